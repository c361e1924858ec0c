#include "graspdec/eval.hpp"

#include "graspdec/covariance.hpp"
#include "graspdec/parallel.hpp"
#include "graspdec/preprocess.hpp"
#include "graspdec/riemann.hpp"
#include "graspdec/rng.hpp"
#include "graspdec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace graspdec {

namespace {

// FNV-1a over raw little-endian doubles; used to fingerprint fitted state.
class Digest {
 public:
  void add(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (bits >> (8 * i)) & 0xff;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(const Mat& m) {
    for (int c = 0; c < m.cols(); ++c) {
      for (int r = 0; r < m.rows(); ++r) add(m(r, c));
    }
  }
  void add(const Vec& v) {
    for (int i = 0; i < v.size(); ++i) add(v[i]);
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_{0xcbf29ce484222325ULL};
};

void add_model_params(Digest& digest, const TrainedModel& model) {
  switch (model.kind) {
    case ModelKind::lda:
      digest.add(model.lda_weights);
      digest.add(model.lda_bias);
      break;
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf:
    case ModelKind::ts_svm:
      digest.add(model.support_vectors);
      digest.add(model.dual_coefs);
      digest.add(model.svm_bias);
      digest.add(model.gamma_used);
      break;
    case ModelKind::mlp:
      digest.add(model.hidden_weights);
      digest.add(model.hidden_bias);
      digest.add(model.output_weights);
      digest.add(model.output_bias);
      break;
    case ModelKind::mdm:
      digest.add(model.mean_first);
      digest.add(model.mean_second);
      break;
  }
}

// Per-trial shrinkage intensity. The floor keeps degenerate trials (for which
// the Ledoit-Wolf estimate is 0 but the scatter is singular) on the SPD
// manifold; it is orders of magnitude below any real-data intensity.
double trial_lambda(const Mat& trial) {
  return std::max(ledoit_wolf_lambda({trial}), 1e-9);
}

std::vector<Mat> shrunk_trial_covariances(const EpochSet& set) {
  std::vector<Mat> covs;
  covs.reserve(set.data.size());
  for (const Mat& trial : set.data) {
    covs.push_back(trial_covariance(trial, trial_lambda(trial)));
  }
  return covs;
}

std::uint64_t pair_tag(PairId pair) {
  return (static_cast<std::uint64_t>(pair.first) << 8) | static_cast<std::uint64_t>(pair.second);
}

}  // namespace

std::vector<PairId> all_pairs() {
  std::vector<PairId> pairs;
  for (int a = 0; a < kNumLabels; ++a) {
    for (int b = a + 1; b < kNumLabels; ++b) {
      pairs.emplace_back(static_cast<Label>(a), static_cast<Label>(b));
    }
  }
  return pairs;
}

std::string pair_name(PairId pair) {
  return std::string(label_name(pair.first)) + "/" + label_name(pair.second);
}

PairId pair_from_name(const std::string& name) {
  const std::size_t slash = name.find('/');
  if (slash == std::string::npos) {
    throw Error(Error::Code::bad_argument, "pair name must look like TG/PG");
  }
  PairId pair{label_from_name(name.substr(0, slash)), label_from_name(name.substr(slash + 1))};
  if (static_cast<int>(pair.first) >= static_cast<int>(pair.second)) {
    throw Error(Error::Code::bad_argument, "pair must be in canonical order: " + name);
  }
  return pair;
}

const char* pipeline_name(PipelineKind p) {
  return p == PipelineKind::csp_wd ? "csp-wd" : "riemann";
}

PipelineKind pipeline_for(ModelKind kind) {
  return (kind == ModelKind::mdm || kind == ModelKind::ts_svm) ? PipelineKind::riemann
                                                               : PipelineKind::csp_wd;
}

FoldPlan stratified_folds(const std::vector<Label>& labels, int k, std::uint64_t seed) {
  if (k < 2) {
    throw Error(Error::Code::bad_argument, "need k >= 2 folds to hold out data");
  }
  FoldPlan plan;
  plan.seed = seed;
  plan.groups.assign(k, {});
  Rng rng(seed);
  for (int code = 0; code < kNumLabels; ++code) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == static_cast<Label>(code)) idx.push_back(static_cast<int>(i));
    }
    if (idx.empty()) continue;
    if (static_cast<int>(idx.size()) < k) {
      throw Error(Error::Code::bad_argument,
                  std::string(label_name(static_cast<Label>(code))) + " has fewer trials than folds");
    }
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      plan.groups[i % k].push_back(idx[i]);
    }
  }
  for (auto& group : plan.groups) std::sort(group.begin(), group.end());
  return plan;
}

BinaryMetrics metrics_from_predictions(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(Error::Code::dimension_mismatch, "prediction/label length mismatch");
  }
  int tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i] == 1) {
      (y_true[i] == 1 ? tp : fp) += 1;
    } else {
      (y_true[i] == 1 ? fn : tn) += 1;
    }
  }
  BinaryMetrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(y_true.size());
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = (m.precision + recall) > 0.0 ? 2.0 * m.precision * recall / (m.precision + recall) : 0.0;
  return m;
}

MetricsReport evaluate_pair(const EpochSet& set, PairId pair, PipelineKind pipeline,
                            const ModelSpec& spec, const FoldPlan& plan,
                            const EvalOptions& opts) {
  set.validate();
  if (pipeline_for(spec.kind) != pipeline) {
    throw Error(Error::Code::bad_argument,
                std::string(model_kind_name(spec.kind)) + " does not run on pipeline " +
                    pipeline_name(pipeline));
  }

  std::vector<int> subset_idx;
  for (int i = 0; i < set.n_trials(); ++i) {
    if (set.labels[i] == pair.first || set.labels[i] == pair.second) subset_idx.push_back(i);
  }
  const EpochSet subset = set.subset(subset_idx);
  const int n = subset.n_trials();
  if (subset.indices_of(pair.first).empty() || subset.indices_of(pair.second).empty()) {
    throw Error(Error::Code::single_class, "set lacks one of the pair classes");
  }

  std::vector<char> seen(n, 0);
  for (const auto& group : plan.groups) {
    for (int i : group) {
      if (i < 0 || i >= n || seen[i]) {
        throw Error(Error::Code::bad_argument, "fold plan does not partition the pair subset");
      }
      seen[i] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error(Error::Code::bad_argument, "fold plan does not cover the pair subset");
  }

  WaveletSpec wavelet = opts.wavelet;

  MetricsReport report;
  report.pair = pair;
  report.pipeline = pipeline;
  report.model = spec.kind;

  for (int f = 0; f < plan.k(); ++f) {
    std::vector<int> train_idx, test_idx = plan.groups[f];
    for (int g = 0; g < plan.k(); ++g) {
      if (g == f) continue;
      train_idx.insert(train_idx.end(), plan.groups[g].begin(), plan.groups[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    if (test_idx.empty()) {
      throw Error(Error::Code::bad_argument, "empty test fold");
    }

    EpochSet train_set = subset.subset(train_idx);
    const EpochSet test_set = subset.subset(test_idx);
    if (train_set.indices_of(pair.first).empty() || train_set.indices_of(pair.second).empty()) {
      throw Error(Error::Code::single_class, "training fold lacks one class");
    }
    if (opts.augment && !opts.paper_order) {
      train_set = augment_analogy(train_set, opts.target_per_class,
                                  derive_seed(opts.seed, pair_tag(pair) * 131 + f));
    }

    std::vector<int> y_train, y_true;
    for (Label l : train_set.labels) y_train.push_back(l == pair.first ? 1 : -1);
    for (Label l : test_set.labels) y_true.push_back(l == pair.first ? 1 : -1);

    Digest digest;
    std::vector<int> y_pred;
    if (pipeline == PipelineKind::csp_wd) {
      auto class_cov = [&](Label label) {
        std::vector<Mat> trials;
        for (int i = 0; i < train_set.n_trials(); ++i) {
          if (train_set.labels[i] == label) trials.push_back(train_set.data[i]);
        }
        const double lambda = ledoit_wolf_lambda(trials);
        return shrink(class_covariance(train_set, label), lambda);
      };
      const CovEstimate ca = class_cov(pair.first);
      const CovEstimate cb = class_cov(pair.second);
      const int n_filters =
          opts.n_filters > 0 ? opts.n_filters : default_filter_count(train_set.n_channels());
      CspModel csp = csp_fit(ca, cb, n_filters);
      csp.pair = pair;

      const FeatureMatrix train_features = feature_matrix(train_set, csp, wavelet, opts.band);
      TrainedModel model = train_vector(spec, train_features.values, y_train, pair);

      digest.add(ca.matrix);
      digest.add(ca.lambda);
      digest.add(cb.matrix);
      digest.add(cb.lambda);
      digest.add(csp.filters);
      for (double mu : csp.eigenvalues) digest.add(mu);
      add_model_params(digest, model);

      for (const Mat& trial : test_set.data) {
        const Vec features = trial_features(trial, csp, wavelet, opts.band);
        y_pred.push_back(predict(model, features).first == pair.first ? 1 : -1);
      }
    } else {
      const std::vector<Mat> train_covs = shrunk_trial_covariances(train_set);
      if (spec.kind == ModelKind::mdm) {
        const TrainedModel model = train_mdm(train_covs, y_train, pair);
        add_model_params(digest, model);
        for (const Mat& trial : test_set.data) {
          const double lambda = trial_lambda(trial);
          const Mat cov = trial_covariance(trial, lambda);
          y_pred.push_back(predict_cov(model, cov).first == pair.first ? 1 : -1);
        }
      } else {
        const Mat base = logeuclid_mean(train_covs);
        Mat z_train(train_covs[0].rows() * (train_covs[0].rows() + 1) / 2,
                    static_cast<int>(train_covs.size()));
        for (std::size_t i = 0; i < train_covs.size(); ++i) {
          z_train.col(static_cast<int>(i)) = uvec_weighted(tangent_project(train_covs[i], base));
        }
        const TrainedModel model = train_vector(spec, z_train, y_train, pair);
        digest.add(base);
        add_model_params(digest, model);
        for (const Mat& trial : test_set.data) {
          const double lambda = trial_lambda(trial);
          const Mat cov = trial_covariance(trial, lambda);
          const Vec z = uvec_weighted(tangent_project(cov, base));
          y_pred.push_back(predict(model, z).first == pair.first ? 1 : -1);
        }
      }
    }

    const BinaryMetrics metrics = metrics_from_predictions(y_true, y_pred);
    FoldMetrics fold;
    fold.accuracy = metrics.accuracy;
    fold.f1 = metrics.f1;
    fold.precision = metrics.precision;
    fold.n_test = static_cast<int>(test_idx.size());
    fold.fit_digest = digest.value();
    report.folds.push_back(fold);
  }

  for (const FoldMetrics& fold : report.folds) {
    report.mean_accuracy += fold.accuracy;
    report.mean_f1 += fold.f1;
    report.mean_precision += fold.precision;
  }
  const double k = static_cast<double>(report.folds.size());
  report.mean_accuracy /= k;
  report.mean_f1 /= k;
  report.mean_precision /= k;
  return report;
}

double pair_class_distinctiveness(const EpochSet& set, PairId pair) {
  std::vector<Mat> covs_a, covs_b;
  for (int i = 0; i < set.n_trials(); ++i) {
    if (set.labels[i] != pair.first && set.labels[i] != pair.second) continue;
    const double lambda = trial_lambda(set.data[i]);
    Mat cov = trial_covariance(set.data[i], lambda);
    (set.labels[i] == pair.first ? covs_a : covs_b).push_back(std::move(cov));
  }
  return class_distinctiveness(covs_a, covs_b);
}

const AblationRow* AblationTable::find(int combo, PairId pair, ModelKind model) const {
  for (const AblationRow& row : rows) {
    if (row.combo_id == combo && row.pair == pair && row.model == model) return &row;
  }
  return nullptr;
}

AblationTable run_ablation(const EpochSet& set, const std::vector<CombinationSpec>& combos,
                           const std::vector<ModelSpec>& models, const std::vector<PairId>& pairs,
                           int k_folds, std::uint64_t fold_seed, const EvalOptions& opts,
                           int jobs) {
  set.validate();
  if (models.empty() || pairs.empty() || combos.empty()) {
    throw Error(Error::Code::bad_argument, "need at least one combo, pair, and model");
  }
  const bool has_baseline =
      std::any_of(combos.begin(), combos.end(), [](const CombinationSpec& c) { return c.id == 0; });
  if (!has_baseline) {
    throw Error(Error::Code::bad_argument, "combination 0 (baseline) must be included");
  }

  ElectrodeLayout layout;
  layout.name = "input";
  layout.names = set.channels;

  // Fold plans are per pair and shared across combinations and models.
  std::vector<FoldPlan> plans;
  for (PairId pair : pairs) {
    std::vector<Label> pair_labels;
    for (Label l : set.labels) {
      if (l == pair.first || l == pair.second) pair_labels.push_back(l);
    }
    plans.push_back(stratified_folds(pair_labels, k_folds, derive_seed(fold_seed, pair_tag(pair))));
  }

  // Channel subsets resolve up front; the (combo, pair) grid then runs in
  // parallel into preallocated slots, so assembly order is fixed.
  std::vector<EpochSet> subs;
  subs.reserve(combos.size());
  for (const CombinationSpec& combo : combos) {
    subs.push_back(select_electrodes(set, resolve_combination(layout, combo, set.meta.handedness)));
  }

  const int n_cells = static_cast<int>(combos.size() * pairs.size());
  std::vector<std::vector<AblationRow>> cells(n_cells);
  parallel_for(n_cells, jobs, [&](int cell) {
    const std::size_t ci = cell / pairs.size();
    const std::size_t pi = cell % pairs.size();
    const EpochSet& sub = subs[ci];
    const double class_dis = pair_class_distinctiveness(sub, pairs[pi]);
    for (const ModelSpec& model : models) {
      EvalOptions combo_opts = opts;
      combo_opts.seed = derive_seed(opts.seed, pair_tag(pairs[pi]));
      const MetricsReport report = evaluate_pair(sub, pairs[pi], pipeline_for(model.kind), model,
                                                 plans[pi], combo_opts);
      AblationRow row;
      row.combo_id = combos[ci].id;
      row.pair = pairs[pi];
      row.model = model.kind;
      row.mean_accuracy = report.mean_accuracy;
      row.class_dis = class_dis;
      cells[cell].push_back(row);
    }
  });

  AblationTable table;
  for (const auto& cell : cells) {
    table.rows.insert(table.rows.end(), cell.begin(), cell.end());
  }
  for (AblationRow& row : table.rows) {
    const AblationRow* base = table.find(0, row.pair, row.model);
    row.drop_vs_baseline = base->mean_accuracy - row.mean_accuracy;
  }
  return table;
}

}  // namespace graspdec
