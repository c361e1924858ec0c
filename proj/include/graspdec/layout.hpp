#pragma once

#include "graspdec/types.hpp"

#include <string>
#include <vector>

namespace graspdec {

// Built-in layouts. "acticap63" is a 63-channel extended 10-20 montage
// (64-electrode cap with Cz used as reference, hence not recorded);
// "openbci16" is the 16-channel Cyton+Daisy default montage. Both are
// editable defaults, not ground truth; override with a layout file.
ElectrodeLayout builtin_layout(const std::string& name);

// Default electrode combinations 0..9 against the acticap63 layout:
//   0 full cap, 1 motor strip (32), 2..5 shrinking contralateral
//   neighborhoods around C3 (right-handed) / C4 (left-handed),
//   6 parieto-occipital rows, 7 frontal rows, 8 contralateral frontal,
//   9 the openbci16 positions.
std::vector<CombinationSpec> builtin_combinations();

// Structured-text (JSON) layout/combination file:
// { "layouts": { name: { "names": [...], "positions": [[x,y],...]? } },
//   "combinations": [ { "id": N, "right": [...], "left": [...] } ] }
struct LayoutFile {
  std::vector<ElectrodeLayout> layouts;
  std::vector<CombinationSpec> combinations;
};

LayoutFile load_layout_file(const std::string& path);
void save_layout_file(const LayoutFile& file, const std::string& path);

// Members of the combination for the given handedness, in layout order.
// Throws Error{unknown_channel} if a member is not in the layout.
std::vector<std::string> resolve_combination(const ElectrodeLayout& layout,
                                             const CombinationSpec& combo,
                                             Handedness handedness);

// Copy of the set restricted to the named channels, in the given order.
EpochSet select_electrodes(const EpochSet& set, const std::vector<std::string>& names);

}  // namespace graspdec
