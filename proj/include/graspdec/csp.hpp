#pragma once

#include "graspdec/covariance.hpp"
#include "graspdec/types.hpp"
#include "graspdec/wavelet.hpp"

#include <utility>
#include <vector>

namespace graspdec {

// Spatial filter bank for one class pair. Columns of `filters` solve
// Ca w = mu (Ca + Cb) w with w' (Ca+Cb) w = 1; the bank keeps the F/2
// largest-mu and F/2 smallest-mu eigenvectors, ordered by descending mu.
struct CspModel {
  std::pair<Label, Label> pair{Label::TG, Label::PG};
  Mat filters;              // E x F
  std::vector<double> eigenvalues;  // length F, descending, in [0, 1]
};

CspModel csp_fit(const CovEstimate& ca, const CovEstimate& cb, int n_filters);

// W^T x trial: project an E x S trial onto the F spatial filters.
Mat csp_apply(const CspModel& model, const Mat& trial);

enum class WaveletBand {
  approx_only,         // deepest approximation band
  approx_plus_detail,  // approximation plus the deepest detail band
};

struct FeatureMatrix {
  Mat values;  // F x n_trials
  std::vector<Label> labels;
};

// Pipeline-A features: CSP projection, multilevel wavelet decomposition per
// filtered signal, log variance of the last-level coefficients. Variances
// below 1e-300 clamp to keep the log finite on degenerate inputs.
FeatureMatrix feature_matrix(const EpochSet& set, const CspModel& model, const WaveletSpec& spec,
                             WaveletBand band = WaveletBand::approx_only);

// Feature vector of a single trial (column of feature_matrix).
Vec trial_features(const Mat& trial, const CspModel& model, const WaveletSpec& spec,
                   WaveletBand band = WaveletBand::approx_only);

// Default filter count: 12 for high-density montages, all channels otherwise.
int default_filter_count(int n_channels);

}  // namespace graspdec
