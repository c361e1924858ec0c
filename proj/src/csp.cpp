#include "graspdec/csp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace graspdec {

namespace {

void require_spd(const Mat& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(Error::Code::not_spd, std::string(what) + " is not positive definite");
  }
}

}  // namespace

int default_filter_count(int n_channels) {
  return n_channels > 16 ? 12 : n_channels;
}

CspModel csp_fit(const CovEstimate& ca, const CovEstimate& cb, int n_filters) {
  const Mat& a = ca.matrix;
  const Mat& b = cb.matrix;
  const int e = static_cast<int>(a.rows());
  if (b.rows() != e || a.cols() != e || b.cols() != e) {
    throw Error(Error::Code::dimension_mismatch, "covariance dimensions disagree");
  }
  if (n_filters < 2 || n_filters % 2 != 0) {
    throw Error(Error::Code::bad_argument, "filter count must be even and >= 2");
  }
  if (n_filters > e) {
    throw Error(Error::Code::bad_argument, "filter count exceeds channel count");
  }
  require_spd(a, "class-a covariance");
  require_spd(b, "class-b covariance");

  // Ca w = mu (Ca + Cb) w. Eigen normalizes eigenvectors to w' B w = 1 with
  // B = Ca + Cb, which is exactly the contract here.
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, a + b);
  if (es.info() != Eigen::Success) {
    throw Error(Error::Code::not_spd, "generalized eigensolver failed");
  }
  const Vec mu = es.eigenvalues();  // ascending
  const Mat vecs = es.eigenvectors();

  std::vector<int> order(e);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return mu[i] > mu[j]; });

  // F/2 largest and F/2 smallest eigenvalues, merged in descending order so
  // the projected class-a variance is monotone along the bank.
  const int half = n_filters / 2;
  std::vector<int> keep;
  for (int i = 0; i < half; ++i) keep.push_back(order[i]);
  for (int i = e - half; i < e; ++i) keep.push_back(order[i]);

  CspModel model;
  model.filters.resize(e, n_filters);
  model.eigenvalues.resize(n_filters);
  for (int f = 0; f < n_filters; ++f) {
    model.filters.col(f) = vecs.col(keep[f]);
    model.eigenvalues[f] = mu[keep[f]];
  }
  return model;
}

Mat csp_apply(const CspModel& model, const Mat& trial) {
  if (trial.rows() != model.filters.rows()) {
    throw Error(Error::Code::dimension_mismatch,
                "trial channel count does not match CSP model");
  }
  return model.filters.transpose() * trial;
}

Vec trial_features(const Mat& trial, const CspModel& model, const WaveletSpec& spec,
                   WaveletBand band) {
  const Mat projected = csp_apply(model, trial);
  const int f = static_cast<int>(projected.rows());
  Vec features(f);
  std::vector<double> row(projected.cols());
  for (int i = 0; i < f; ++i) {
    for (int s = 0; s < projected.cols(); ++s) row[s] = projected(i, s);
    const WaveletDecomposition decomp = dwt(row, spec);
    std::vector<double> coefs = decomp.approx;
    if (band == WaveletBand::approx_plus_detail) {
      const std::vector<double>& deepest = decomp.details.back();
      coefs.insert(coefs.end(), deepest.begin(), deepest.end());
    }
    double mean = 0.0;
    for (double c : coefs) mean += c;
    mean /= static_cast<double>(coefs.size());
    double var = 0.0;
    for (double c : coefs) var += (c - mean) * (c - mean);
    var /= static_cast<double>(coefs.size());
    features[i] = std::log(std::max(var, 1e-300));
  }
  return features;
}

FeatureMatrix feature_matrix(const EpochSet& set, const CspModel& model, const WaveletSpec& spec,
                             WaveletBand band) {
  set.validate();
  FeatureMatrix out;
  out.labels = set.labels;
  out.values.resize(model.filters.cols(), set.n_trials());
  for (int t = 0; t < set.n_trials(); ++t) {
    out.values.col(t) = trial_features(set.data[t], model, spec, band);
  }
  return out;
}

}  // namespace graspdec
