#include "graspdec/synth.hpp"

#include "graspdec/preprocess.hpp"
#include "graspdec/rng.hpp"

#include <cmath>

namespace graspdec {

namespace {

Vec index_bump(int n, double center, double width) {
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    const double d = (static_cast<double>(i) - center) / width;
    v[i] = std::exp(-d * d);
  }
  return v;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_channels < 1) throw Error(Error::Code::bad_config, "need at least one channel");
  if (!(sample_rate > 0.0)) throw Error(Error::Code::bad_config, "sample rate must be > 0");
  if (trials_per_class < 3) {
    throw Error(Error::Code::bad_config, "need >= 3 trials per class");
  }
  if (patterns.empty()) throw Error(Error::Code::bad_config, "no class patterns configured");
  for (const auto& [label, pattern] : patterns) {
    if (pattern.size() != n_channels) {
      throw Error(Error::Code::bad_config,
                  std::string("pattern for ") + label_name(label) + " has wrong dimension");
    }
    if (std::abs(pattern.norm() - 1.0) > 1e-6) {
      throw Error(Error::Code::bad_config,
                  std::string("pattern for ") + label_name(label) + " is not unit norm");
    }
    auto it = gains.find(label);
    if (it == gains.end() || !(it->second > 0.0)) {
      throw Error(Error::Code::bad_config,
                  std::string("missing or non-positive gain for ") + label_name(label));
    }
  }
  if (!channels.empty() && static_cast<int>(channels.size()) != n_channels) {
    throw Error(Error::Code::bad_config, "channel name count != n_channels");
  }
}

SynthSpec default_synth_spec(const std::vector<std::string>& channels, double sample_rate,
                             int trials_per_class, std::uint64_t seed,
                             double pattern_separation) {
  SynthSpec spec;
  spec.n_channels = static_cast<int>(channels.size());
  spec.sample_rate = sample_rate;
  spec.trials_per_class = trials_per_class;
  spec.seed = seed;
  spec.channels = channels;

  // Focus on C3 when the montage names it, otherwise mid-array.
  double center = spec.n_channels / 2.0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == "C3") {
      center = static_cast<double>(i);
      break;
    }
  }
  const int e = spec.n_channels;
  Vec base = index_bump(e, center, 2.0);
  base /= base.norm();

  // The three movement patterns sit at the corners of an equilateral triangle
  // in a two-dimensional subspace orthogonal to the shared focus, so every
  // movement pair is equally hard; Rest reuses the focus with low gain.
  auto orthonormalize = [&](Vec v, const std::vector<Vec>& against) {
    for (const Vec& a : against) v -= a.dot(v) * a;
    const double n = v.norm();
    return Vec(n > 1e-12 ? v / n : v);
  };
  const Vec dir1 = orthonormalize(
      index_bump(e, center - 2.0, 1.5) - index_bump(e, center + 2.0, 1.5), {base});
  const Vec dir2 = orthonormalize(index_bump(e, center, 0.7), {base, dir1});

  const double s = pattern_separation;
  auto corner = [&](double theta) {
    Vec p = base + s * (std::cos(theta) * dir1 + std::sin(theta) * dir2);
    return Vec(p / p.norm());
  };
  spec.patterns[Label::TG] = corner(M_PI / 2.0);
  spec.patterns[Label::PG] = corner(M_PI / 2.0 + 2.0 * M_PI / 3.0);
  spec.patterns[Label::Open] = corner(M_PI / 2.0 + 4.0 * M_PI / 3.0);
  spec.patterns[Label::Rest] = base;
  spec.gains = {{Label::TG, 1.0}, {Label::PG, 1.0}, {Label::Open, 1.0}, {Label::Rest, 0.2}};
  spec.noise_sigma = 1.0;
  return spec;
}

EpochSet generate(const SynthSpec& spec) {
  spec.validate();
  const int s = static_cast<int>(std::lround(spec.sample_rate));  // 1-second epochs
  const FilterSpec band = bandpass_spec(8.0, 30.0);

  EpochSet set;
  set.sample_rate = spec.sample_rate;
  if (spec.channels.empty()) {
    for (int c = 0; c < spec.n_channels; ++c) set.channels.push_back("ch" + std::to_string(c + 1));
  } else {
    set.channels = spec.channels;
  }

  for (const auto& [label, pattern] : spec.patterns) {
    const double gain = spec.gains.at(label);
    for (int t = 0; t < spec.trials_per_class; ++t) {
      Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(label) * 100003ULL +
                                         static_cast<std::uint64_t>(t)));
      std::vector<double> white(s);
      for (double& v : white) v = rng.normal();
      std::vector<double> source = filter_signal(white, band, spec.sample_rate);
      double rms = 0.0;
      for (double v : source) rms += v * v;
      rms = std::sqrt(rms / s);
      const double scale = rms > 0.0 ? gain / rms : 0.0;

      Mat trial(spec.n_channels, s);
      for (int c = 0; c < spec.n_channels; ++c) {
        for (int i = 0; i < s; ++i) {
          trial(c, i) = pattern[c] * scale * source[i] + spec.noise_sigma * rng.normal();
        }
      }
      set.data.push_back(std::move(trial));
      set.labels.push_back(label);
    }
  }
  set.validate();
  return set;
}

}  // namespace graspdec
