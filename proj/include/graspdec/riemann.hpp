#pragma once

#include "graspdec/types.hpp"

#include <vector>

namespace graspdec {

// Symmetric-eigendecomposition matrix log/exp. matrix_log throws
// Error{not_spd} when any eigenvalue is <= 0.
Mat matrix_log(const Mat& spd);
Mat matrix_exp(const Mat& symmetric);

// Per-trial shrunk covariance: shrink((1/S) X X^T, lambda).
Mat trial_covariance(const Mat& trial, double lambda);

// exp( mean of logs ).
Mat logeuclid_mean(const std::vector<Mat>& mats);

// || Log A - Log B ||_F.
double logeuclid_distance(const Mat& a, const Mat& b);

// Log( M^{-1/2} C M^{-1/2} ); the whitened log-map of C at base point M.
Mat tangent_project(const Mat& c, const Mat& m);

// Weighted upper-triangular vectorization: multiply off-diagonals by sqrt(2)
// and read the upper triangle row-major, so ||z||_2 == ||S||_F.
Vec uvec_weighted(const Mat& s);

}  // namespace graspdec
