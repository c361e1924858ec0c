#pragma once

#include "graspdec/classify.hpp"
#include "graspdec/csp.hpp"
#include "graspdec/layout.hpp"
#include "graspdec/types.hpp"
#include "graspdec/wavelet.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace graspdec {

using PairId = std::pair<Label, Label>;

// The six unordered class pairs in canonical (ordinal) order.
std::vector<PairId> all_pairs();
std::string pair_name(PairId pair);
PairId pair_from_name(const std::string& name);

enum class PipelineKind { csp_wd, riemann };
const char* pipeline_name(PipelineKind p);
PipelineKind pipeline_for(ModelKind kind);

struct FoldPlan {
  std::vector<std::vector<int>> groups;  // disjoint trial-index groups
  std::uint64_t seed{0};
  int k() const { return static_cast<int>(groups.size()); }
};

// Seeded stratified partition; per-class counts differ by at most one across
// folds. Requires k >= 2 and every class count >= k.
FoldPlan stratified_folds(const std::vector<Label>& labels, int k, std::uint64_t seed);

struct EvalOptions {
  bool augment{true};        // augment inside each training fold
  bool paper_order{false};   // input set is pre-augmented; skip in-fold augmentation
  int target_per_class{90};
  WaveletSpec wavelet{};
  WaveletBand band{WaveletBand::approx_only};
  int n_filters{0};          // 0 -> default_filter_count(n_channels)
  std::uint64_t seed{0};     // base seed for in-fold augmentation
};

struct FoldMetrics {
  double accuracy{0.0};
  double f1{0.0};
  double precision{0.0};
  int n_test{0};
  std::uint64_t fit_digest{0};  // hash over every train-side fitted parameter
};

struct MetricsReport {
  PairId pair{Label::TG, Label::PG};
  PipelineKind pipeline{PipelineKind::csp_wd};
  ModelKind model{ModelKind::lda};
  std::vector<FoldMetrics> folds;
  double mean_accuracy{0.0};
  double mean_f1{0.0};
  double mean_precision{0.0};
};

// Cross-validated evaluation of one classifier on one class pair. The plan
// indexes the pair-subset of `set` (trials of the two classes in set order).
// All trainable state (augmentation, covariances, CSP filters, tangent base,
// classifier) is fitted per fold on the training side only.
MetricsReport evaluate_pair(const EpochSet& set, PairId pair, PipelineKind pipeline,
                            const ModelSpec& spec, const FoldPlan& plan,
                            const EvalOptions& opts = {});

// Accuracy / F1 / precision with +1 as the positive class. Zero-denominator
// precision and F1 are reported as 0.
struct BinaryMetrics {
  double accuracy{0.0};
  double f1{0.0};
  double precision{0.0};
};
BinaryMetrics metrics_from_predictions(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred);

struct AblationRow {
  int combo_id{0};
  PairId pair{Label::TG, Label::PG};
  ModelKind model{ModelKind::lda};
  double mean_accuracy{0.0};
  double class_dis{0.0};
  double drop_vs_baseline{0.0};
};

struct AblationTable {
  std::vector<AblationRow> rows;
  const AblationRow* find(int combo, PairId pair, ModelKind model) const;
};

// Re-fits the full pipeline per fold for every electrode combination.
// Combination 0 must be present; it is the drop baseline. Fold plans derive
// deterministically from fold_seed per pair and are shared across
// combinations so rows stay comparable. Results are identical for any worker
// count.
AblationTable run_ablation(const EpochSet& set, const std::vector<CombinationSpec>& combos,
                           const std::vector<ModelSpec>& models, const std::vector<PairId>& pairs,
                           int k_folds, std::uint64_t fold_seed, const EvalOptions& opts = {},
                           int jobs = 1);

// classDis of the pair's trials in `set` from shrunk per-trial covariances.
double pair_class_distinctiveness(const EpochSet& set, PairId pair);

}  // namespace graspdec
