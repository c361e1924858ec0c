#pragma once

#include "graspdec/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace graspdec {

enum class ModelKind { lda, svm_linear, svm_rbf, mlp, mdm, ts_svm };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelSpec {
  ModelKind kind{ModelKind::lda};
  double cost{1.0};             // SVM soft-margin C
  double gamma{0.0};            // RBF width; 0 selects 1/(F * mean feature variance)
  int hidden{15};               // MLP hidden units
  int max_epochs{150};          // SCG iterations
  double tolerance{1e-3};       // SMO KKT tolerance
  long max_smo_updates{1000000};
  std::uint64_t seed{0};
};

// One fitted binary classifier behind a uniform predict contract. Only the
// fields of the trained kind are populated.
struct TrainedModel {
  ModelKind kind{ModelKind::lda};
  std::pair<Label, Label> pair{Label::TG, Label::PG};
  int feature_dim{0};
  ModelSpec spec;

  // LDA
  Vec lda_weights;
  double lda_bias{0.0};

  // SVM family (svm_linear, svm_rbf, ts_svm)
  Mat support_vectors;  // F x n_sv
  Vec dual_coefs;       // alpha_i * y_i per support vector
  double svm_bias{0.0};
  double gamma_used{0.0};

  // MLP (tanh hidden layer, logistic output)
  Mat hidden_weights;  // H x F
  Vec hidden_bias;     // H
  Vec output_weights;  // H
  double output_bias{0.0};

  // MDM (log-Euclidean class means; logs cached for distance evaluation)
  Mat mean_first, mean_second;
  Mat log_mean_first, log_mean_second;
};

double rbf_kernel(const Vec& a, const Vec& b, double gamma);

// Train LDA / SVM-linear / SVM-RBF / MLP / TS-SVM on column features.
// y[i] = +1 marks pair.first, -1 marks pair.second.
TrainedModel train_vector(const ModelSpec& spec, const Mat& features, const std::vector<int>& y,
                          std::pair<Label, Label> pair);

// Minimal-distance-to-mean over SPD trial covariances, log-Euclidean metric.
TrainedModel train_mdm(const std::vector<Mat>& covs, const std::vector<int>& y,
                       std::pair<Label, Label> pair);

// Deterministic label plus a signed score; positive means pair.first, and
// exact ties resolve to pair.first.
std::pair<Label, double> predict(const TrainedModel& model, const Vec& x);
std::pair<Label, double> predict_cov(const TrainedModel& model, const Mat& cov);

// MLP forward/gradient exposed for gradient checking: returns the mean
// cross-entropy loss; when grad != nullptr it receives d(loss)/d(params) for
// the packed parameter vector [W1, b1, w2, b2].
double mlp_loss_grad(const Vec& params, const Mat& features, const std::vector<int>& y, int hidden,
                     Vec* grad);

}  // namespace graspdec
