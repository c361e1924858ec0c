#pragma once

#include "graspdec/types.hpp"

#include <string>

namespace graspdec {

// Binary epoch file, little-endian throughout:
//   magic "EEGE" (4 bytes)
//   version        u16   (currently 1)
//   n_trials       u32
//   n_channels     u32
//   n_samples      u32
//   sample_rate    f32
//   labels         n_trials x u8   (0=TG, 1=PG, 2=Open, 3=Rest)
//   channel names  n_channels x (u16 byte length + UTF-8 bytes)
//   data           f32, trial-major, channel-major, sample-minor
//
// Writing is deterministic: identical sets produce identical bytes. Sample
// values are stored as f32; load/save round-trips exactly on f32-representable
// amplitudes.
EpochSet load_epochs(const std::string& path);
void save_epochs(const EpochSet& set, const std::string& path);

}  // namespace graspdec
