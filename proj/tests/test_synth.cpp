#include "graspdec/synth.hpp"

#include "graspdec/classify.hpp"
#include "graspdec/layout.hpp"
#include "graspdec/covariance.hpp"
#include "graspdec/csp.hpp"
#include "graspdec/riemann.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace graspdec;
using namespace graspdec::testutil;

namespace {

// Direct-DFT band power oracle, independent of the library FFT.
double band_power(const std::vector<double>& x, double rate, double f_lo, double f_hi) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (int k = 1; k < n / 2; ++k) {
    const double freq = rate * k / n;
    if (freq < f_lo || freq > f_hi) continue;
    double re = 0.0, im = 0.0;
    for (int t = 0; t < n; ++t) {
      re += x[t] * std::cos(2.0 * M_PI * k * t / n);
      im -= x[t] * std::sin(2.0 * M_PI * k * t / n);
    }
    total += (re * re + im * im) / (n * n);
  }
  return total;
}

SynthSpec two_class_spec(double sigma, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_channels = 8;
  spec.sample_rate = 250.0;
  spec.trials_per_class = 12;
  spec.noise_sigma = sigma;
  spec.seed = seed;
  Vec pa = Vec::Zero(8), pb = Vec::Zero(8);
  pa[2] = 1.0;
  pb[5] = 1.0;
  spec.patterns[Label::TG] = pa;
  spec.patterns[Label::PG] = pb;
  spec.gains = {{Label::TG, 1.0}, {Label::PG, 1.0}};
  return spec;
}

}  // namespace

TEST_CASE("generation is bit-identical for a fixed seed") {
  const SynthSpec spec = default_synth_spec({"c1", "c2", "c3", "c4", "c5", "c6"}, 250.0, 5, 77);
  const EpochSet a = generate(spec);
  const EpochSet b = generate(spec);
  CHECK(sets_equal(a, b));
  SynthSpec other = spec;
  other.seed = 78;
  CHECK(!sets_equal(a, generate(other)));
}

TEST_CASE("generated sets satisfy the epoch invariants") {
  const SynthSpec spec = default_synth_spec({"a", "b", "c", "d"}, 125.0, 4, 3);
  const EpochSet set = generate(spec);
  set.validate();
  CHECK(set.n_trials() == 16);  // 4 classes x 4 trials
  CHECK(set.n_samples() == 125);
  CHECK(set.indices_of(Label::Rest).size() == 4);
}

TEST_CASE("movement band power exceeds rest band power on the pattern channel") {
  SynthSpec spec = default_synth_spec(builtin_layout("openbci16").names, 250.0, 8, 11);
  spec.gains[Label::Rest] = 0.2;
  const EpochSet set = generate(spec);
  // the strongest channel of the TG pattern
  int focus = 0;
  spec.patterns[Label::TG].cwiseAbs().maxCoeff(&focus);

  auto mean_band_power = [&](Label label) {
    double acc = 0.0;
    int count = 0;
    for (int i : set.indices_of(label)) {
      std::vector<double> row(set.n_samples());
      for (int s = 0; s < set.n_samples(); ++s) row[s] = set.data[i](focus, s);
      acc += band_power(row, 250.0, 8.0, 30.0);
      ++count;
    }
    return acc / count;
  };
  CHECK(mean_band_power(Label::TG) > 2.0 * mean_band_power(Label::Rest));
}

TEST_CASE("noiseless orthogonal patterns are perfectly separable by MDM") {
  const SynthSpec spec = two_class_spec(1e-4, 19);
  const EpochSet set = generate(spec);
  std::vector<Mat> covs;
  std::vector<int> y;
  for (int i = 0; i < set.n_trials(); ++i) {
    covs.push_back(trial_covariance(set.data[i], 0.1));
    y.push_back(set.labels[i] == Label::TG ? 1 : -1);
  }
  const TrainedModel model = train_mdm(covs, y, {Label::TG, Label::PG});
  int correct = 0;
  for (std::size_t i = 0; i < covs.size(); ++i) {
    if ((predict_cov(model, covs[i]).first == Label::TG ? 1 : -1) == y[i]) ++correct;
  }
  CHECK(correct == set.n_trials());
}

TEST_CASE("CSP recovers the planted pattern direction on noiseless data") {
  const SynthSpec spec = two_class_spec(1e-6, 23);
  const EpochSet set = generate(spec);
  const Mat ca = class_covariance(set, Label::TG);
  const Mat cb = class_covariance(set, Label::PG);
  const CspModel model = csp_fit(shrink(ca, 1e-9), shrink(cb, 1e-9), 2);

  // top eigendirection of the true covariance difference = the TG pattern
  const Vec w = model.filters.col(0);
  const Vec target = spec.patterns.at(Label::TG);
  const double cosine = std::abs(w.dot(target)) / (w.norm() * target.norm());
  CHECK(cosine > 0.99);
}

TEST_CASE("invalid specs are rejected") {
  SynthSpec spec = two_class_spec(1.0, 1);
  spec.patterns[Label::TG] *= 2.0;  // not unit norm
  CHECK_THROWS_AS(generate(spec), Error);

  SynthSpec bad_trials = two_class_spec(1.0, 1);
  bad_trials.trials_per_class = 2;
  CHECK_THROWS_AS(generate(bad_trials), Error);

  SynthSpec bad_gain = two_class_spec(1.0, 1);
  bad_gain.gains[Label::PG] = 0.0;
  CHECK_THROWS_AS(generate(bad_gain), Error);
}
