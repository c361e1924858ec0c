#pragma once

#include "graspdec/types.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace graspdec {

// --- segmentation -----------------------------------------------------------

enum class Phase { Grip, Release, RestCross };
enum class TaskObject { BB, CUP, CS, none };

struct Event {
  double time_s{0.0};  // seconds from recording start
  Phase phase{Phase::RestCross};
  TaskObject object{TaskObject::none};
};

struct EventList {
  std::vector<Event> entries;
  // Times non-decreasing; RestCross events carry object none.
  void validate() const;
};

struct Recording {
  Mat data;  // channels x samples
  double sample_rate{0.0};
  std::vector<std::string> channels;
};

using LabelRule = std::function<Label(Phase, TaskObject)>;

// Grip+BB/CS -> TG, Grip+CUP -> PG, Release -> Open, RestCross -> Rest.
Label gmr_label_rule(Phase phase, TaskObject object);

EpochSet segment(const Recording& recording, const EventList& events, double window_s,
                 const LabelRule& label_rule = gmr_label_rule);

// --- filtering and resampling ----------------------------------------------

struct FilterSpec {
  enum class Kind { notch, bandpass };
  Kind kind{Kind::bandpass};
  double f0{50.0};     // notch centre, Hz
  double f_lo{8.0};    // bandpass edges, Hz
  double f_hi{30.0};
  int order{4};        // Butterworth prototype order (bandpass); 2 for notch
  double q{35.0};      // notch quality factor
  bool zero_phase{true};
};

FilterSpec notch_spec(double f0, double q = 35.0);
FilterSpec bandpass_spec(double f_lo, double f_hi, int order = 4);

// Zero-phase mode runs the filter forward and backward (implemented exactly as
// squared-magnitude filtering on an odd-extended signal), so group delay is
// zero and the operation commutes with time reversal. Causal mode runs a
// single forward pass through the biquad cascade.
EpochSet apply_filter(const EpochSet& set, const FilterSpec& spec);
std::vector<double> filter_signal(const std::vector<double>& x, const FilterSpec& spec,
                                  double sample_rate);

// Integer-factor decimation with a 64-tap Hamming-windowed FIR anti-alias
// lowpass at 0.4 x target_rate. Equal-rate calls return the set unchanged.
EpochSet resample(const EpochSet& set, double target_rate);

// --- augmentation ------------------------------------------------------------

// Grow every class to target_per_class trials. Originals are preserved
// verbatim; each artificial trial is built from a seeded ordered triplet
// (a, b, c) of distinct same-class trials by transferring the spectral
// magnitude ratio |b|/|a| onto c per wavelet coefficient (ratios clamped to
// [1/4, 4]), then inverting the transform. Artificial trials are appended
// after all originals, grouped by class in label order.
EpochSet augment_analogy(const EpochSet& set, int target_per_class, std::uint64_t seed);

// --- robust normalization -----------------------------------------------------

struct NormalizationParams {
  std::vector<double> q5, q50, q95;  // per electrode, microvolts
  int n_channels() const { return static_cast<int>(q50.size()); }
};

// Per-electrode 5th/50th/95th percentiles over all trials and samples pooled
// across classes (linear interpolation between order statistics).
NormalizationParams fit_normalization(const EpochSet& set);

// Per electrode: (x - q50) / (q95 - q5).
EpochSet normalize_robust(const EpochSet& set, const NormalizationParams& params);

void save_normalization(const NormalizationParams& params, const std::string& path);
NormalizationParams load_normalization(const std::string& path);

// Linear-interpolation percentile of pre-sorted values, p in [0, 1].
double percentile_sorted(const std::vector<double>& sorted, double p);

}  // namespace graspdec
