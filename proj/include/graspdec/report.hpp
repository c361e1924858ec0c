#pragma once

#include "graspdec/eval.hpp"

#include <string>
#include <vector>

namespace graspdec {

// One evaluated (combination, pair, model) cell of the result grid.
struct EvalResult {
  int combo_id{0};
  MetricsReport report;
  double chance{0.0};     // chance_level over the total held-out count
  double class_dis{0.0};  // classDis of the pair on the evaluated channels
};

// Deterministic number formatting shared by every report writer.
std::string format_number(double v);

// One row per combo x pair x model x fold.
void write_folds_csv(const std::vector<EvalResult>& results, const std::string& path);

// One aggregated row per combo x pair x model.
void write_results_csv(const std::vector<EvalResult>& results, const std::string& path);

void write_summary_json(const std::vector<EvalResult>& results, const std::string& path);

void write_ablation_csv(const AblationTable& table, const std::string& path);

// Static grouped bar chart: one group per combination, one bar per pair
// (mean accuracy averaged over the models in the run).
void write_ablation_svg(const AblationTable& table, const std::string& path);

}  // namespace graspdec
