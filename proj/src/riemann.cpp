#include "graspdec/riemann.hpp"

#include "graspdec/covariance.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace graspdec {

namespace {

void require_symmetric(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(Error::Code::dimension_mismatch, std::string(what) + " must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(Error::Code::not_symmetric, std::string(what) + " is not symmetric");
  }
}

Mat apply_spectral(const Mat& sym, double (*fn)(double), bool require_positive,
                   const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(Error::Code::not_spd, std::string(what) + ": eigendecomposition failed");
  }
  Vec vals = es.eigenvalues();
  if (require_positive && vals.minCoeff() <= 0.0) {
    throw Error(Error::Code::not_spd, std::string(what) + " has a non-positive eigenvalue");
  }
  for (int i = 0; i < vals.size(); ++i) vals[i] = fn(vals[i]);
  Mat out = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

Mat matrix_log(const Mat& spd) {
  require_symmetric(spd, "matrix_log input");
  return apply_spectral(spd, [](double x) { return std::log(x); }, true, "matrix_log input");
}

Mat matrix_exp(const Mat& symmetric) {
  require_symmetric(symmetric, "matrix_exp input");
  return apply_spectral(symmetric, [](double x) { return std::exp(x); }, false,
                        "matrix_exp input");
}

Mat trial_covariance(const Mat& trial, double lambda) {
  if (trial.cols() < 2) {
    throw Error(Error::Code::bad_argument, "trial needs at least 2 samples");
  }
  Mat cov = trial * trial.transpose() / static_cast<double>(trial.cols());
  return shrink(0.5 * (cov + cov.transpose()), lambda).matrix;
}

Mat logeuclid_mean(const std::vector<Mat>& mats) {
  if (mats.empty()) {
    throw Error(Error::Code::bad_argument, "mean of empty matrix list");
  }
  const auto rows = mats[0].rows();
  Mat acc = Mat::Zero(rows, rows);
  for (const Mat& m : mats) {
    if (m.rows() != rows || m.cols() != rows) {
      throw Error(Error::Code::dimension_mismatch, "matrices disagree in dimension");
    }
    acc += matrix_log(m);
  }
  acc /= static_cast<double>(mats.size());
  return matrix_exp(acc);
}

double logeuclid_distance(const Mat& a, const Mat& b) {
  return (matrix_log(a) - matrix_log(b)).norm();
}

Mat tangent_project(const Mat& c, const Mat& m) {
  require_symmetric(c, "tangent_project input");
  require_symmetric(m, "tangent_project base");
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(Error::Code::not_spd, "tangent_project base is not positive definite");
  }
  // Eigenvalue floor rejects near-singular base points explicitly.
  Vec vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] < 1e-12) {
      throw Error(Error::Code::not_spd, "tangent_project base is numerically singular");
    }
    vals[i] = 1.0 / std::sqrt(vals[i]);
  }
  const Mat inv_sqrt = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  Mat whitened = inv_sqrt * c * inv_sqrt;
  return matrix_log(0.5 * (whitened + whitened.transpose()));
}

Vec uvec_weighted(const Mat& s) {
  require_symmetric(s, "uvec_weighted input");
  const int e = static_cast<int>(s.rows());
  Vec z(e * (e + 1) / 2);
  const double root2 = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < e; ++i) {
    for (int j = i; j < e; ++j) {
      z[k++] = i == j ? s(i, j) : root2 * s(i, j);
    }
  }
  return z;
}

}  // namespace graspdec
