#pragma once

#include "graspdec/types.hpp"

#include <vector>

namespace graspdec {

struct CovEstimate {
  Mat matrix;
  double lambda{0.0};  // shrinkage intensity in [0, 1]
  int n_trials{0};
};

// Class scatter (1/N) sum_j X_j X_j^T over the trials carrying `label`.
Mat class_covariance(const EpochSet& set, Label label);

// Ledoit-Wolf optimal shrinkage intensity toward the scaled identity target,
// estimated from observation vectors (the columns of each trial), clipped to
// [0, 1].
double ledoit_wolf_lambda(const std::vector<Mat>& trials);

// Convex shrinkage (1-lambda) C + lambda nu I with nu = trace(C)/E.
CovEstimate shrink(const Mat& c, double lambda);

}  // namespace graspdec
