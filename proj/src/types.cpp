#include "graspdec/types.hpp"

#include <cmath>

namespace graspdec {

const char* label_name(Label l) {
  switch (l) {
    case Label::TG: return "TG";
    case Label::PG: return "PG";
    case Label::Open: return "Open";
    case Label::Rest: return "Rest";
  }
  throw Error(Error::Code::unknown_label, "invalid label value");
}

Label label_from_name(const std::string& name) {
  if (name == "TG") return Label::TG;
  if (name == "PG") return Label::PG;
  if (name == "Open") return Label::Open;
  if (name == "Rest") return Label::Rest;
  throw Error(Error::Code::unknown_label, "unknown label name: " + name);
}

Label label_from_code(std::uint8_t code) {
  if (code >= kNumLabels) {
    throw Error(Error::Code::unknown_label,
                "unknown label code: " + std::to_string(static_cast<int>(code)));
  }
  return static_cast<Label>(code);
}

void EpochSet::validate() const {
  if (labels.size() != data.size()) {
    throw Error(Error::Code::dimension_mismatch, "labels length != n_trials");
  }
  if (!(sample_rate > 0.0)) {
    throw Error(Error::Code::bad_argument, "sample_rate must be > 0");
  }
  const int e = n_channels();
  const int s = n_samples();
  if (static_cast<int>(channels.size()) != e) {
    throw Error(Error::Code::dimension_mismatch, "channel name count != n_channels");
  }
  for (const Mat& trial : data) {
    if (trial.rows() != e || trial.cols() != s) {
      throw Error(Error::Code::dimension_mismatch, "ragged trial dimensions");
    }
    if (!trial.allFinite()) {
      throw Error(Error::Code::non_finite_sample, "non-finite amplitude in trial data");
    }
  }
}

std::vector<int> EpochSet::indices_of(Label l) const {
  std::vector<int> out;
  for (int i = 0; i < n_trials(); ++i) {
    if (labels[i] == l) out.push_back(i);
  }
  return out;
}

EpochSet EpochSet::subset(const std::vector<int>& trial_indices) const {
  EpochSet out;
  out.sample_rate = sample_rate;
  out.channels = channels;
  out.meta = meta;
  out.data.reserve(trial_indices.size());
  out.labels.reserve(trial_indices.size());
  for (int i : trial_indices) {
    if (i < 0 || i >= n_trials()) {
      throw Error(Error::Code::out_of_bounds, "trial index out of range");
    }
    out.data.push_back(data[i]);
    out.labels.push_back(labels[i]);
  }
  return out;
}

}  // namespace graspdec
