#pragma once

#include "graspdec/types.hpp"

#include <string>
#include <vector>

namespace graspdec {

struct WaveletSpec {
  std::string family{"db4"};  // orthogonal Daubechies family, db1..db10
  int level{3};
};

// Multilevel decomposition. details[0] is the level-1 (finest) detail band;
// approx is the level-`level` approximation band. input_lengths records the
// per-level input size needed for exact inverse reconstruction.
struct WaveletDecomposition {
  std::vector<std::vector<double>> details;
  std::vector<double> approx;
  std::vector<int> input_lengths;

  double total_energy() const;
};

// Periodized orthogonal DWT. Odd-length inputs are zero-padded by one sample
// before each level, which keeps the transform an isometry (coefficient
// energy equals signal energy) and perfectly invertible at every length.
WaveletDecomposition dwt(const std::vector<double>& signal, const WaveletSpec& spec);
std::vector<double> idwt(const WaveletDecomposition& decomp, const WaveletSpec& spec);

}  // namespace graspdec
