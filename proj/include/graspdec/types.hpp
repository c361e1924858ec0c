#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspdec {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Library-wide error with a machine-checkable code. Messages are for humans,
// codes are for callers and tests.
class Error : public std::runtime_error {
 public:
  enum class Code {
    malformed_header,
    dimension_mismatch,
    unknown_label,
    non_finite_sample,
    unwritable_path,
    unknown_channel,
    degenerate_scale,
    out_of_bounds,
    bad_argument,
    single_class,
    not_spd,
    not_symmetric,
    signal_too_short,
    no_convergence,
    bad_config,
    io_failure,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// The four decoded movement classes. Ordinal encoding is fixed: it is the
// on-disk label byte and defines the canonical class-pair order.
enum class Label : std::uint8_t {
  TG = 0,    // tripod grip
  PG = 1,    // power grip
  Open = 2,  // hand opening
  Rest = 3,  // resting state
};

inline constexpr int kNumLabels = 4;

const char* label_name(Label l);
Label label_from_name(const std::string& name);
Label label_from_code(std::uint8_t code);

enum class SubjectGroup { able_bodied, amputee };
enum class Condition { ME, MI, MO };
enum class Handedness { right, left };

struct SessionMeta {
  std::string subject_id;
  SubjectGroup group{SubjectGroup::able_bodied};
  int session{1};  // 1..3
  Condition condition{Condition::ME};
  Handedness handedness{Handedness::right};
};

// One recording session worth of fixed-length trials. data[t] is an
// n_channels x n_samples matrix of amplitudes in microvolts.
struct EpochSet {
  std::vector<Mat> data;
  std::vector<Label> labels;
  double sample_rate{0.0};
  std::vector<std::string> channels;
  SessionMeta meta;

  int n_trials() const { return static_cast<int>(data.size()); }
  int n_channels() const { return data.empty() ? 0 : static_cast<int>(data[0].rows()); }
  int n_samples() const { return data.empty() ? 0 : static_cast<int>(data[0].cols()); }

  // Throws Error on any violated invariant (ragged dims, label/channel count
  // mismatch, non-finite sample, non-positive rate).
  void validate() const;

  // Indices of trials carrying the given label.
  std::vector<int> indices_of(Label l) const;

  // New set holding copies of the selected trials, in the given order.
  EpochSet subset(const std::vector<int>& trial_indices) const;
};

struct ElectrodeLayout {
  std::string name;
  std::vector<std::string> names;
  // Optional 2-D scalp coordinates, one per name when present.
  std::vector<std::pair<double, double>> positions;
};

// A named electrode subset. Combination 0 is the full layout; lateralized
// combinations differ between right- and left-handed subjects.
struct CombinationSpec {
  int id{0};
  std::vector<std::string> members_right;
  std::vector<std::string> members_left;
};

}  // namespace graspdec
