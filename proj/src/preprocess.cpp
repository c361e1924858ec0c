#include "graspdec/preprocess.hpp"

#include "graspdec/rng.hpp"
#include "graspdec/wavelet.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace graspdec {

void EventList::validate() const {
  double prev = -std::numeric_limits<double>::infinity();
  for (const Event& e : entries) {
    if (e.time_s < prev) {
      throw Error(Error::Code::bad_argument, "event times must be non-decreasing");
    }
    prev = e.time_s;
    if (e.phase == Phase::RestCross && e.object != TaskObject::none) {
      throw Error(Error::Code::bad_argument, "RestCross events carry no object");
    }
    if (e.phase != Phase::RestCross && e.object == TaskObject::none) {
      throw Error(Error::Code::bad_argument, "Grip/Release events need an object");
    }
  }
}

Label gmr_label_rule(Phase phase, TaskObject object) {
  switch (phase) {
    case Phase::Grip:
      return object == TaskObject::CUP ? Label::PG : Label::TG;
    case Phase::Release:
      return Label::Open;
    case Phase::RestCross:
      return Label::Rest;
  }
  throw Error(Error::Code::bad_argument, "unknown phase");
}

EpochSet segment(const Recording& recording, const EventList& events, double window_s,
                 const LabelRule& label_rule) {
  if (!(recording.sample_rate > 0.0)) {
    throw Error(Error::Code::bad_argument, "recording sample rate must be > 0");
  }
  if (!(window_s > 0.0)) {
    throw Error(Error::Code::bad_argument, "window must be > 0 seconds");
  }
  events.validate();

  const int n_win = static_cast<int>(std::lround(window_s * recording.sample_rate));
  const int n_total = static_cast<int>(recording.data.cols());

  EpochSet set;
  set.sample_rate = recording.sample_rate;
  if (!recording.channels.empty()) {
    if (static_cast<int>(recording.channels.size()) != recording.data.rows()) {
      throw Error(Error::Code::dimension_mismatch, "recording channel names != rows");
    }
    set.channels = recording.channels;
  } else {
    for (int c = 0; c < recording.data.rows(); ++c) set.channels.push_back("ch" + std::to_string(c + 1));
  }
  for (const Event& e : events.entries) {
    const long start = std::lround(e.time_s * recording.sample_rate);
    if (start < 0 || start + n_win > n_total) {
      throw Error(Error::Code::out_of_bounds, "event window exceeds recording bounds");
    }
    set.data.push_back(recording.data.middleCols(start, n_win));
    set.labels.push_back(label_rule(e.phase, e.object));
  }
  set.validate();
  return set;
}

EpochSet augment_analogy(const EpochSet& set, int target_per_class, std::uint64_t seed) {
  set.validate();
  const int n_samples = set.n_samples();
  WaveletSpec wspec;
  wspec.family = "db4";
  wspec.level = n_samples >= 8 ? 3 : (n_samples >= 4 ? 2 : 1);

  EpochSet out = set;
  Rng rng(seed);
  for (int code = 0; code < kNumLabels; ++code) {
    const Label label = static_cast<Label>(code);
    const std::vector<int> idx = set.indices_of(label);
    const int have = static_cast<int>(idx.size());
    if (have == 0) continue;
    if (have > target_per_class) {
      throw Error(Error::Code::bad_argument,
                  std::string(label_name(label)) + " already exceeds target count");
    }
    if (have == target_per_class) continue;
    if (have < 3) {
      throw Error(Error::Code::bad_argument,
                  std::string(label_name(label)) + " needs >= 3 trials to augment");
    }
    for (int j = have; j < target_per_class; ++j) {
      // Ordered distinct triplet (a, b, c) of original same-class trials.
      const int a = idx[rng.index(have)];
      int b = idx[rng.index(have)];
      while (b == a) b = idx[rng.index(have)];
      int c = idx[rng.index(have)];
      while (c == a || c == b) c = idx[rng.index(have)];

      Mat artificial(set.n_channels(), n_samples);
      std::vector<double> row(n_samples);
      for (int ch = 0; ch < set.n_channels(); ++ch) {
        auto take = [&](int trial) {
          for (int s = 0; s < n_samples; ++s) row[s] = set.data[trial](ch, s);
          return dwt(row, wspec);
        };
        const WaveletDecomposition da = take(a);
        const WaveletDecomposition db = take(b);
        WaveletDecomposition dc = take(c);

        auto blend = [](std::vector<double>& wc, const std::vector<double>& wa,
                        const std::vector<double>& wb) {
          for (std::size_t i = 0; i < wc.size(); ++i) {
            const double ratio =
                std::clamp(std::abs(wb[i]) / (std::abs(wa[i]) + 1e-12), 0.25, 4.0);
            wc[i] *= ratio;
          }
        };
        blend(dc.approx, da.approx, db.approx);
        for (std::size_t lv = 0; lv < dc.details.size(); ++lv) {
          blend(dc.details[lv], da.details[lv], db.details[lv]);
        }
        const std::vector<double> rec = idwt(dc, wspec);
        for (int s = 0; s < n_samples; ++s) artificial(ch, s) = rec[s];
      }
      out.data.push_back(std::move(artificial));
      out.labels.push_back(label);
    }
  }
  return out;
}

NormalizationParams fit_normalization(const EpochSet& set) {
  set.validate();
  if (set.n_trials() == 0) {
    throw Error(Error::Code::bad_argument, "cannot fit normalization on an empty set");
  }
  const int e = set.n_channels();
  NormalizationParams params;
  params.q5.resize(e);
  params.q50.resize(e);
  params.q95.resize(e);
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(set.n_trials()) * set.n_samples());
  for (int c = 0; c < e; ++c) {
    pooled.clear();
    for (const Mat& trial : set.data) {
      for (int s = 0; s < trial.cols(); ++s) pooled.push_back(trial(c, s));
    }
    std::sort(pooled.begin(), pooled.end());
    params.q5[c] = percentile_sorted(pooled, 0.05);
    params.q50[c] = percentile_sorted(pooled, 0.50);
    params.q95[c] = percentile_sorted(pooled, 0.95);
    if (!(params.q95[c] - params.q5[c] > 0.0)) {
      throw Error(Error::Code::degenerate_scale,
                  "electrode " + set.channels[c] + " has degenerate scale (q95 == q5)");
    }
  }
  return params;
}

EpochSet normalize_robust(const EpochSet& set, const NormalizationParams& params) {
  set.validate();
  if (params.n_channels() != set.n_channels()) {
    throw Error(Error::Code::dimension_mismatch,
                "normalization params fitted for a different channel count");
  }
  EpochSet out = set;
  for (Mat& trial : out.data) {
    for (int c = 0; c < trial.rows(); ++c) {
      const double center = params.q50[c];
      const double scale = params.q95[c] - params.q5[c];
      for (int s = 0; s < trial.cols(); ++s) {
        trial(c, s) = (trial(c, s) - center) / scale;
      }
    }
  }
  return out;
}

void save_normalization(const NormalizationParams& params, const std::string& path) {
  nlohmann::json j;
  j["q5"] = params.q5;
  j["q50"] = params.q50;
  j["q95"] = params.q95;
  std::ofstream out(path);
  if (!out) throw Error(Error::Code::unwritable_path, "cannot write " + path);
  out << j.dump(2) << "\n";
}

NormalizationParams load_normalization(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Code::io_failure, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    NormalizationParams params;
    params.q5 = j.at("q5").get<std::vector<double>>();
    params.q50 = j.at("q50").get<std::vector<double>>();
    params.q95 = j.at("q95").get<std::vector<double>>();
    if (params.q5.size() != params.q50.size() || params.q50.size() != params.q95.size()) {
      throw Error(Error::Code::bad_config, "normalization arrays disagree in length");
    }
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Error::Code::bad_config, "normalization file schema error: " + std::string(e.what()));
  }
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    throw Error(Error::Code::bad_argument, "percentile of empty data");
  }
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t i = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace graspdec
