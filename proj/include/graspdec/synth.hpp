#pragma once

#include "graspdec/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace graspdec {

// Seeded generator of 1-second epochs with planted class structure: per class
// a unit-norm spatial pattern carries a band-limited (8-30 Hz) noise source
// scaled by the class band gain, on top of spatially white noise. Covariance
// structure, not phase, separates the classes.
struct SynthSpec {
  int n_channels{16};
  double sample_rate{250.0};  // 125 or 250
  int trials_per_class{30};
  std::map<Label, Vec> patterns;     // unit vector per class
  std::map<Label, double> gains;     // band-power multiplier per class
  double noise_sigma{1.0};
  std::uint64_t seed{0};
  std::vector<std::string> channels;  // optional; defaults to ch1..chE

  void validate() const;
};

// Default four-class configuration over the given channel names: the three
// movement classes share a central scalp focus with partially overlapping
// patterns, Rest carries reduced band power.
// pattern_separation scales the per-class deviation from the shared focus:
// smaller values overlap the movement patterns more.
SynthSpec default_synth_spec(const std::vector<std::string>& channels, double sample_rate,
                             int trials_per_class, std::uint64_t seed,
                             double pattern_separation = 0.25);

EpochSet generate(const SynthSpec& spec);

}  // namespace graspdec
