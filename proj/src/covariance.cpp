#include "graspdec/covariance.hpp"

#include <cmath>

namespace graspdec {

Mat class_covariance(const EpochSet& set, Label label) {
  const std::vector<int> idx = set.indices_of(label);
  if (idx.empty()) {
    throw Error(Error::Code::single_class,
                std::string("no trials of class ") + label_name(label));
  }
  const int e = set.n_channels();
  Mat cov = Mat::Zero(e, e);
  for (int i : idx) {
    cov.noalias() += set.data[i] * set.data[i].transpose();
  }
  cov /= static_cast<double>(idx.size());
  return 0.5 * (cov + cov.transpose());  // kill asymmetry from rounding
}

double ledoit_wolf_lambda(const std::vector<Mat>& trials) {
  if (trials.empty()) {
    throw Error(Error::Code::bad_argument, "no trials given");
  }
  const int p = static_cast<int>(trials[0].rows());
  long n = 0;
  for (const Mat& t : trials) {
    if (t.rows() != p) {
      throw Error(Error::Code::dimension_mismatch, "trials disagree in channel count");
    }
    n += t.cols();
  }
  if (n < 2) {
    throw Error(Error::Code::bad_argument, "need at least 2 observation vectors");
  }

  // Uncentered second moments, matching the covariance definition used by the
  // feature pipelines (band-passed signals are zero-mean by construction).
  Mat s = Mat::Zero(p, p);
  double quartic_sum = 0.0;
  for (const Mat& t : trials) {
    s.noalias() += t * t.transpose();
    for (int j = 0; j < t.cols(); ++j) {
      const double sq = t.col(j).squaredNorm();
      quartic_sum += sq * sq;
    }
  }
  s /= static_cast<double>(n);

  const double mu = s.trace() / p;
  Mat dev = s;
  dev.diagonal().array() -= mu;
  const double d2 = dev.squaredNorm() / p;
  if (d2 <= 0.0) return 0.0;
  const double s_norm2 = s.squaredNorm();
  const double b2_raw =
      (quartic_sum - static_cast<double>(n) * s_norm2) / (static_cast<double>(n) * n * p);
  const double b2 = std::min(std::max(b2_raw, 0.0), d2);
  return b2 / d2;
}

CovEstimate shrink(const Mat& c, double lambda) {
  if (c.rows() != c.cols()) {
    throw Error(Error::Code::dimension_mismatch, "covariance must be square");
  }
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(Error::Code::not_symmetric, "covariance is not symmetric");
  }
  if (lambda < 0.0 || lambda > 1.0) {
    throw Error(Error::Code::bad_argument, "shrinkage intensity must be in [0, 1]");
  }
  CovEstimate est;
  const double nu = c.trace() / static_cast<double>(c.rows());
  est.matrix = (1.0 - lambda) * 0.5 * (c + c.transpose());
  est.matrix.diagonal().array() += lambda * nu;
  est.lambda = lambda;
  return est;
}

}  // namespace graspdec
