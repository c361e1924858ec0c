#include "graspdec/classify.hpp"

#include "graspdec/riemann.hpp"
#include "graspdec/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace graspdec {

namespace {

void check_training_input(const Mat& features, const std::vector<int>& y) {
  if (static_cast<std::size_t>(features.cols()) != y.size()) {
    throw Error(Error::Code::dimension_mismatch, "label count != sample count");
  }
  if (!features.allFinite()) {
    throw Error(Error::Code::non_finite_sample, "non-finite feature value");
  }
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw Error(Error::Code::bad_argument, "labels must be +1/-1");
  }
  if (!has_pos || !has_neg) {
    throw Error(Error::Code::single_class, "training data contains a single class");
  }
}

double default_gamma(const Mat& features) {
  const int f = static_cast<int>(features.rows());
  const Vec mean = features.rowwise().mean();
  double var = 0.0;
  for (int i = 0; i < f; ++i) {
    var += (features.row(i).array() - mean[i]).square().mean();
  }
  var /= static_cast<double>(f);
  return var > 0.0 ? 1.0 / (f * var) : 1.0;
}

double kernel_value(bool linear, const Vec& a, const Vec& b, double gamma) {
  return linear ? a.dot(b) : rbf_kernel(a, b, gamma);
}

void fit_lda(TrainedModel& model, const Mat& x, const std::vector<int>& y) {
  const int f = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  Vec mean_pos = Vec::Zero(f), mean_neg = Vec::Zero(f);
  int n_pos = 0, n_neg = 0;
  for (int i = 0; i < n; ++i) {
    if (y[i] == 1) {
      mean_pos += x.col(i);
      ++n_pos;
    } else {
      mean_neg += x.col(i);
      ++n_neg;
    }
  }
  mean_pos /= n_pos;
  mean_neg /= n_neg;

  Mat pooled = Mat::Zero(f, f);
  for (int i = 0; i < n; ++i) {
    const Vec d = x.col(i) - (y[i] == 1 ? mean_pos : mean_neg);
    pooled.noalias() += d * d.transpose();
  }
  pooled /= std::max(1, n - 2);
  double nu = pooled.trace() / f;
  if (!(nu > 0.0)) nu = 1.0;
  pooled.diagonal().array() += 1e-10 * nu;  // keep the solve well-posed

  model.lda_weights = pooled.ldlt().solve(mean_pos - mean_neg);
  model.lda_bias = -model.lda_weights.dot(0.5 * (mean_pos + mean_neg)) +
                   std::log(static_cast<double>(n_pos) / n_neg);
}

// SMO on the dual with maximal-violating-pair working set selection.
void fit_svm(TrainedModel& model, const ModelSpec& spec, const Mat& x,
             const std::vector<int>& y) {
  const int n = static_cast<int>(x.cols());
  const bool linear = spec.kind == ModelKind::svm_linear;
  const double gamma = spec.gamma > 0.0 ? spec.gamma : default_gamma(x);
  const double c = spec.cost;
  if (!(c > 0.0)) throw Error(Error::Code::bad_argument, "SVM cost must be > 0");

  Mat k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      k(i, j) = k(j, i) = kernel_value(linear, x.col(i), x.col(j), gamma);
    }
  }

  std::vector<double> alpha(n, 0.0);
  // grad[i] = d/d alpha_i of (1/2 a'Qa - e'a) with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(n, -1.0);

  long updates = 0;
  while (true) {
    int i_up = -1, i_low = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0);
      const bool in_low = (y[t] == -1 && alpha[t] < c) || (y[t] == 1 && alpha[t] > 0.0);
      if (in_up && v > m_up) {
        m_up = v;
        i_up = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        i_low = t;
      }
    }
    if (i_up < 0 || i_low < 0 || m_up - m_low <= spec.tolerance) {
      model.svm_bias = (i_up >= 0 && i_low >= 0) ? (m_up + m_low) / 2.0 : 0.0;
      break;
    }
    if (++updates > spec.max_smo_updates) {
      throw Error(Error::Code::no_convergence, "SMO hit the pair-update cap");
    }

    const int i = i_up, j = i_low;
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    quad = std::max(quad, 1e-12);
    double step = (m_up - m_low) / quad;
    // alpha_i moves by +y_i*step, alpha_j by -y_j*step; clip to the box.
    double limit_i = y[i] == 1 ? c - alpha[i] : alpha[i];
    double limit_j = y[j] == -1 ? c - alpha[j] : alpha[j];
    step = std::min({step, limit_i, limit_j});
    const double delta_i = y[i] * step;
    const double delta_j = -y[j] * step;
    alpha[i] += delta_i;
    alpha[j] += delta_j;
    for (int t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * k(t, i) * delta_i + y[j] * k(t, j) * delta_j);
    }
  }

  std::vector<int> sv;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] > 1e-12) sv.push_back(i);
  }
  model.support_vectors.resize(x.rows(), static_cast<int>(sv.size()));
  model.dual_coefs.resize(static_cast<int>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.col(static_cast<int>(s)) = x.col(sv[s]);
    model.dual_coefs[static_cast<int>(s)] = alpha[sv[s]] * y[sv[s]];
  }
  model.gamma_used = gamma;
}

void unpack_mlp(const Vec& params, int hidden, int f, Mat& w1, Vec& b1, Vec& w2, double& b2) {
  int pos = 0;
  w1 = Eigen::Map<const Mat>(params.data(), hidden, f);
  pos += hidden * f;
  b1 = params.segment(pos, hidden);
  pos += hidden;
  w2 = params.segment(pos, hidden);
  pos += hidden;
  b2 = params[pos];
}

void fit_mlp(TrainedModel& model, const ModelSpec& spec, const Mat& x,
             const std::vector<int>& y) {
  const int f = static_cast<int>(x.rows());
  const int h = spec.hidden;
  if (h < 1) throw Error(Error::Code::bad_argument, "hidden layer must have >= 1 unit");
  const int n_params = h * f + h + h + 1;

  Rng rng(spec.seed);
  Vec w(n_params);
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(f));
  const double hid_scale = 1.0 / std::sqrt(static_cast<double>(h));
  for (int i = 0; i < h * f + h; ++i) w[i] = rng.uniform(-in_scale, in_scale);
  for (int i = h * f + h; i < n_params; ++i) w[i] = rng.uniform(-hid_scale, hid_scale);

  // Scaled conjugate gradient (Moller 1993), full batch.
  const double sigma0 = 1e-4;
  double lambda = 1e-6, lambda_bar = 0.0;
  Vec grad(n_params), grad_new(n_params), grad_probe(n_params);
  double err = mlp_loss_grad(w, x, y, h, &grad);
  Vec r = -grad;
  Vec p = r;
  bool success = true;
  double delta = 0.0;
  Vec step_dir;

  for (int k = 1; k <= spec.max_epochs; ++k) {
    const double p_norm2 = p.squaredNorm();
    if (p_norm2 < 1e-30 || r.norm() < 1e-12) break;
    if (success) {
      const double sigma = sigma0 / std::sqrt(p_norm2);
      mlp_loss_grad(w + sigma * p, x, y, h, &grad_probe);
      delta = p.dot(grad_probe - grad) / sigma;
    }
    delta += (lambda - lambda_bar) * p_norm2;
    if (delta <= 0.0) {
      lambda_bar = 2.0 * (lambda - delta / p_norm2);
      delta = -delta + lambda * p_norm2;
      lambda = lambda_bar;
    }
    const double mu = p.dot(r);
    const double alpha = mu / delta;
    const double err_new = mlp_loss_grad(w + alpha * p, x, y, h, nullptr);
    const double comparison = 2.0 * delta * (err - err_new) / (mu * mu);
    if (comparison >= 0.0) {
      w += alpha * p;
      err = mlp_loss_grad(w, x, y, h, &grad_new);
      lambda_bar = 0.0;
      success = true;
      Vec r_new = -grad_new;
      if (k % n_params == 0) {
        p = r_new;
      } else {
        const double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
        p = r_new + beta * p;
      }
      r = r_new;
      grad = grad_new;
      if (comparison >= 0.75) lambda = std::max(lambda * 0.25, 1e-15);
    } else {
      lambda_bar = lambda;
      success = false;
    }
    if (comparison < 0.25) {
      lambda += delta * (1.0 - comparison) / p_norm2;
    }
    if (!std::isfinite(lambda) || lambda > 1e100) break;
  }

  unpack_mlp(w, h, f, model.hidden_weights, model.hidden_bias, model.output_weights,
             model.output_bias);
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::lda: return "lda";
    case ModelKind::svm_linear: return "svm-linear";
    case ModelKind::svm_rbf: return "svm-rbf";
    case ModelKind::mlp: return "mlp";
    case ModelKind::mdm: return "mdm";
    case ModelKind::ts_svm: return "ts-svm";
  }
  throw Error(Error::Code::bad_argument, "invalid model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::lda, ModelKind::svm_linear, ModelKind::svm_rbf, ModelKind::mlp,
                      ModelKind::mdm, ModelKind::ts_svm}) {
    if (name == model_kind_name(k)) return k;
  }
  throw Error(Error::Code::bad_argument, "unknown model kind: " + name);
}

double rbf_kernel(const Vec& a, const Vec& b, double gamma) {
  if (a.size() != b.size()) {
    throw Error(Error::Code::dimension_mismatch, "rbf_kernel dimension mismatch");
  }
  if (!(gamma > 0.0)) {
    throw Error(Error::Code::bad_argument, "rbf gamma must be > 0");
  }
  return std::exp(-gamma * (a - b).squaredNorm());
}

double mlp_loss_grad(const Vec& params, const Mat& x, const std::vector<int>& y, int hidden,
                     Vec* grad) {
  const int f = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  Mat w1;
  Vec b1, w2;
  double b2;
  unpack_mlp(params, hidden, f, w1, b1, w2, b2);

  Mat z1 = (w1 * x).colwise() + b1;
  Mat a1 = z1.array().tanh().matrix();  // hidden x n
  Vec logits = (a1.transpose() * w2).array() + b2;

  double loss = 0.0;
  Vec dlogit(n);
  for (int i = 0; i < n; ++i) {
    const double t = y[i] == 1 ? 1.0 : 0.0;
    const double z = logits[i];
    // log(1 + exp(z)) evaluated stably.
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - t * z;
    dlogit[i] = 1.0 / (1.0 + std::exp(-z)) - t;
  }
  loss /= n;
  if (grad == nullptr) return loss;

  dlogit /= n;
  Vec dw2 = a1 * dlogit;
  const double db2 = dlogit.sum();
  Mat da1 = w2 * dlogit.transpose();           // hidden x n
  Mat dz1 = da1.array() * (1.0 - a1.array().square());
  Mat dw1 = dz1 * x.transpose();
  Vec db1 = dz1.rowwise().sum();

  grad->resize(params.size());
  int pos = 0;
  Eigen::Map<Mat>(grad->data(), hidden, f) = dw1;
  pos += hidden * f;
  grad->segment(pos, hidden) = db1;
  pos += hidden;
  grad->segment(pos, hidden) = dw2;
  pos += hidden;
  (*grad)[pos] = db2;
  return loss;
}

TrainedModel train_vector(const ModelSpec& spec, const Mat& features, const std::vector<int>& y,
                          std::pair<Label, Label> pair) {
  check_training_input(features, y);
  TrainedModel model;
  model.kind = spec.kind;
  model.pair = pair;
  model.feature_dim = static_cast<int>(features.rows());
  model.spec = spec;
  switch (spec.kind) {
    case ModelKind::lda:
      fit_lda(model, features, y);
      break;
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf:
    case ModelKind::ts_svm:
      fit_svm(model, spec, features, y);
      break;
    case ModelKind::mlp:
      fit_mlp(model, spec, features, y);
      break;
    case ModelKind::mdm:
      throw Error(Error::Code::bad_argument, "MDM trains on covariances, use train_mdm");
  }
  return model;
}

TrainedModel train_mdm(const std::vector<Mat>& covs, const std::vector<int>& y,
                       std::pair<Label, Label> pair) {
  if (covs.size() != y.size()) {
    throw Error(Error::Code::dimension_mismatch, "label count != covariance count");
  }
  std::vector<Mat> first, second;
  for (std::size_t i = 0; i < covs.size(); ++i) {
    if (y[i] == 1) first.push_back(covs[i]);
    else if (y[i] == -1) second.push_back(covs[i]);
    else throw Error(Error::Code::bad_argument, "labels must be +1/-1");
  }
  if (first.empty() || second.empty()) {
    throw Error(Error::Code::single_class, "MDM needs trials of both classes");
  }
  TrainedModel model;
  model.kind = ModelKind::mdm;
  model.pair = pair;
  model.feature_dim = static_cast<int>(covs[0].rows());
  model.mean_first = logeuclid_mean(first);
  model.mean_second = logeuclid_mean(second);
  model.log_mean_first = matrix_log(model.mean_first);
  model.log_mean_second = matrix_log(model.mean_second);
  return model;
}

std::pair<Label, double> predict(const TrainedModel& model, const Vec& x) {
  if (model.kind == ModelKind::mdm) {
    throw Error(Error::Code::bad_argument, "MDM predicts on covariances, use predict_cov");
  }
  if (x.size() != model.feature_dim) {
    throw Error(Error::Code::dimension_mismatch, "feature dimension mismatch");
  }
  double score = 0.0;
  switch (model.kind) {
    case ModelKind::lda:
      score = model.lda_weights.dot(x) + model.lda_bias;
      break;
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf:
    case ModelKind::ts_svm: {
      const bool linear = model.kind == ModelKind::svm_linear;
      for (int s = 0; s < model.support_vectors.cols(); ++s) {
        score += model.dual_coefs[s] *
                 kernel_value(linear, model.support_vectors.col(s), x, model.gamma_used);
      }
      score += model.svm_bias;
      break;
    }
    case ModelKind::mlp: {
      const Vec hidden = ((model.hidden_weights * x) + model.hidden_bias).array().tanh();
      score = model.output_weights.dot(hidden) + model.output_bias;
      break;
    }
    case ModelKind::mdm:
      break;
  }
  return {score >= 0.0 ? model.pair.first : model.pair.second, score};
}

std::pair<Label, double> predict_cov(const TrainedModel& model, const Mat& cov) {
  if (model.kind != ModelKind::mdm) {
    throw Error(Error::Code::bad_argument, "predict_cov is only defined for MDM");
  }
  if (cov.rows() != model.feature_dim || cov.cols() != model.feature_dim) {
    throw Error(Error::Code::dimension_mismatch, "covariance dimension mismatch");
  }
  const Mat log_cov = matrix_log(cov);
  const double d_first = (log_cov - model.log_mean_first).norm();
  const double d_second = (log_cov - model.log_mean_second).norm();
  const double score = d_second - d_first;
  return {score >= 0.0 ? model.pair.first : model.pair.second, score};
}

}  // namespace graspdec
