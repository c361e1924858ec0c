#include "graspdec/preprocess.hpp"

#include "graspdec/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace graspdec;
using namespace graspdec::testutil;

namespace {

double rms(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(hi - lo));
}

std::vector<double> sine(double freq, double rate, int n, double amp = 1.0) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * M_PI * freq * i / rate);
  return x;
}

EpochSet one_trial_set(const std::vector<double>& signal, double rate) {
  EpochSet set;
  set.sample_rate = rate;
  set.channels = {"ch1"};
  Mat trial(1, static_cast<int>(signal.size()));
  for (std::size_t i = 0; i < signal.size(); ++i) trial(0, static_cast<int>(i)) = signal[i];
  set.data.push_back(trial);
  set.labels.push_back(Label::TG);
  return set;
}

}  // namespace

TEST_CASE("segment slices the recording at event windows") {
  const double rate = 250.0;
  const int n = 2500;
  Recording rec;
  rec.sample_rate = rate;
  rec.channels = {"ch1"};
  rec.data.resize(1, n);
  for (int i = 0; i < n; ++i) rec.data(0, i) = static_cast<double>(i);  // ramp

  EventList events;
  events.entries.push_back({2.0, Phase::Grip, TaskObject::CUP});
  events.entries.push_back({4.0, Phase::Grip, TaskObject::BB});
  events.entries.push_back({5.0, Phase::Grip, TaskObject::CS});
  events.entries.push_back({6.0, Phase::Release, TaskObject::CUP});
  events.entries.push_back({8.0, Phase::RestCross, TaskObject::none});

  const EpochSet set = segment(rec, events, 1.0);
  REQUIRE(set.n_trials() == 5);
  CHECK(set.n_samples() == 250);
  CHECK(set.labels == std::vector<Label>{Label::PG, Label::TG, Label::TG, Label::Open, Label::Rest});
  // direct slicing oracle on the ramp
  for (int s = 0; s < 250; ++s) {
    CHECK(set.data[0](0, s) == doctest::Approx(500.0 + s));
  }

  SUBCASE("window exceeding the recording is rejected") {
    EventList late;
    late.entries.push_back({9.5, Phase::Grip, TaskObject::BB});
    try {
      segment(rec, late, 1.0);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Error::Code::out_of_bounds);
    }
  }

  SUBCASE("event list invariants are enforced") {
    EventList bad;
    bad.entries.push_back({3.0, Phase::RestCross, TaskObject::BB});
    CHECK_THROWS_AS(segment(rec, bad, 1.0), Error);
  }
}

TEST_CASE("resample decimates by the rate ratio") {
  SUBCASE("2000 Hz to 250 Hz reduces 2000 samples to 250") {
    Rng rng(21);
    const EpochSet set = random_epoch_set(rng, 3, 4, 2000, 2000.0);
    const EpochSet dec = resample(set, 250.0);
    CHECK(dec.n_samples() == 250);
    CHECK(dec.sample_rate == doctest::Approx(250.0));
    CHECK(dec.n_trials() == 3);
  }

  SUBCASE("equal-rate call is the identity") {
    Rng rng(22);
    const EpochSet set = random_epoch_set(rng, 2, 2, 125, 125.0);
    const EpochSet same = resample(set, 125.0);
    CHECK(sets_equal(set, same));
  }

  SUBCASE("a 10 Hz sine survives decimation") {
    const EpochSet set = one_trial_set(sine(10.0, 2000.0, 2000), 2000.0);
    const EpochSet dec = resample(set, 250.0);
    const std::vector<double> ref = sine(10.0, 250.0, 250);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int i = 0; i < 250; ++i) {
      dot += dec.data[0](0, i) * ref[i];
      na += dec.data[0](0, i) * dec.data[0](0, i);
      nb += ref[i] * ref[i];
    }
    CHECK(dot / std::sqrt(na * nb) >= 0.999);
  }

  SUBCASE("non-integer factors and upsampling are rejected") {
    Rng rng(23);
    const EpochSet set = random_epoch_set(rng, 1, 1, 64, 300.0);
    CHECK_THROWS_AS(resample(set, 80.0), Error);
    CHECK_THROWS_AS(resample(set, 600.0), Error);
  }

  SUBCASE("decimating twice equals decimating once") {
    Rng rng(24);
    const EpochSet set = random_epoch_set(rng, 2, 2, 2000, 2000.0);
    const EpochSet once = resample(set, 250.0);
    const EpochSet twice = resample(resample(set, 250.0), 250.0);
    for (int t = 0; t < once.n_trials(); ++t) {
      const double scale = once.data[t].cwiseAbs().maxCoeff();
      CHECK((once.data[t] - twice.data[t]).norm() <= 1e-6 * scale * once.data[t].size());
    }
  }
}

TEST_CASE("notch filter suppresses its centre frequency") {
  const int n = 2500;
  const std::vector<double> x = sine(50.0, 250.0, n);
  const std::vector<double> y = filter_signal(x, notch_spec(50.0), 250.0);
  const double in_rms = rms(x, n / 2 - 250, n / 2 + 250);
  const double out_rms = rms(y, n / 2 - 250, n / 2 + 250);
  CHECK(out_rms <= 0.01 * in_rms);
}

TEST_CASE("bandpass keeps the passband") {
  const int n = 2500;
  const std::vector<double> x = sine(20.0, 250.0, n);
  const std::vector<double> y = filter_signal(x, bandpass_spec(8.0, 30.0), 250.0);
  const double in_rms = rms(x, n / 2 - 250, n / 2 + 250);
  const double out_rms = rms(y, n / 2 - 250, n / 2 + 250);
  CHECK(out_rms >= 0.9 * in_rms);
  CHECK(out_rms <= 1.1 * in_rms);
}

TEST_CASE("bandpass attenuates stopband tones") {
  const int n = 2500;
  for (double freq : {2.0, 60.0}) {
    const std::vector<double> x = sine(freq, 250.0, n);
    const std::vector<double> y = filter_signal(x, bandpass_spec(8.0, 30.0), 250.0);
    CHECK(rms(y, n / 2 - 250, n / 2 + 250) < 0.1 * rms(x, n / 2 - 250, n / 2 + 250));
  }
}

TEST_CASE("zero-phase filtering commutes with time reversal") {
  Rng rng(31);
  std::vector<double> x(300);
  for (double& v : x) v = rng.normal();
  for (const FilterSpec& spec : {bandpass_spec(8.0, 30.0), notch_spec(50.0)}) {
    const std::vector<double> forward = filter_signal(x, spec, 250.0);
    std::vector<double> reversed(x.rbegin(), x.rend());
    std::vector<double> back = filter_signal(reversed, spec, 250.0);
    std::reverse(back.begin(), back.end());
    double max_err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      max_err = std::max(max_err, std::abs(back[i] - forward[i]));
      scale = std::max(scale, std::abs(forward[i]));
    }
    CHECK(max_err <= 1e-9 * std::max(scale, 1.0));
  }
}

TEST_CASE("all-zero epochs stay zero through filters") {
  EpochSet set = one_trial_set(std::vector<double>(250, 0.0), 250.0);
  const EpochSet out = apply_filter(set, bandpass_spec(8.0, 30.0));
  CHECK(out.data[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("filter frequencies at or above Nyquist are rejected") {
  Rng rng(33);
  const EpochSet set = random_epoch_set(rng, 1, 1, 250, 250.0);
  CHECK_THROWS_AS(apply_filter(set, bandpass_spec(8.0, 125.0)), Error);
  CHECK_THROWS_AS(apply_filter(set, notch_spec(130.0)), Error);
}

TEST_CASE("causal filtering is stable and attenuates the notch tone") {
  const int n = 5000;
  FilterSpec spec = notch_spec(50.0);
  spec.zero_phase = false;
  const std::vector<double> x = sine(50.0, 250.0, n);
  const std::vector<double> y = filter_signal(x, spec, 250.0);
  CHECK(rms(y, n - 500, n) <= 0.02 * rms(x, n - 500, n));
}

TEST_CASE("analogy augmentation") {
  Rng rng(41);
  EpochSet set;
  set.sample_rate = 125.0;
  set.channels = {"ch1", "ch2"};
  auto add_trials = [&](Label label, int count) {
    for (int i = 0; i < count; ++i) {
      Mat trial(2, 125);
      for (int c = 0; c < 2; ++c) {
        for (int s = 0; s < 125; ++s) trial(c, s) = rng.normal();
      }
      set.data.push_back(trial);
      set.labels.push_back(label);
    }
  };
  add_trials(Label::TG, 30);
  add_trials(Label::Rest, 10);

  SUBCASE("30 to 90 and 10 to 90") {
    const EpochSet out = augment_analogy(set, 90, 7);
    CHECK(out.n_trials() == 180);
    CHECK(out.indices_of(Label::TG).size() == 90);
    CHECK(out.indices_of(Label::Rest).size() == 90);
    // originals preserved verbatim, in place
    for (int i = 0; i < set.n_trials(); ++i) {
      CHECK(out.labels[i] == set.labels[i]);
      CHECK((out.data[i] - set.data[i]).cwiseAbs().maxCoeff() == 0.0);
    }
    for (const Mat& trial : out.data) CHECK(trial.allFinite());
  }

  SUBCASE("same seed gives identical output") {
    const EpochSet a = augment_analogy(set, 90, 7);
    const EpochSet b = augment_analogy(set, 90, 7);
    CHECK(sets_equal(a, b));
    const EpochSet c = augment_analogy(set, 90, 8);
    CHECK(!sets_equal(a, c));
  }

  SUBCASE("a class below three trials cannot be augmented") {
    EpochSet tiny;
    tiny.sample_rate = 125.0;
    tiny.channels = {"ch1", "ch2"};
    tiny.data = {set.data[0], set.data[1]};
    tiny.labels = {Label::TG, Label::TG};
    CHECK_THROWS_AS(augment_analogy(tiny, 90, 1), Error);
  }

  SUBCASE("target below the current count is rejected") {
    CHECK_THROWS_AS(augment_analogy(set, 20, 1), Error);
  }
}

TEST_CASE("normalization percentiles follow linear interpolation") {
  // one channel whose pooled samples are exactly 1..100
  EpochSet set;
  set.sample_rate = 100.0;
  set.channels = {"ch1"};
  Rng rng(55);
  std::vector<double> values(100);
  std::iota(values.begin(), values.end(), 1.0);
  rng.shuffle(values);
  for (int t = 0; t < 4; ++t) {
    Mat trial(1, 25);
    for (int s = 0; s < 25; ++s) trial(0, s) = values[t * 25 + s];
    set.data.push_back(trial);
    set.labels.push_back(Label::TG);
  }
  const NormalizationParams params = fit_normalization(set);
  // sort-based oracle: q50 = 50.5, q5 = 5.95, q95 = 95.05
  CHECK(params.q50[0] == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(params.q5[0] == doctest::Approx(5.95).epsilon(1e-12));
  CHECK(params.q95[0] == doctest::Approx(95.05).epsilon(1e-12));

  SUBCASE("constant electrode is degenerate") {
    EpochSet flat = set;
    for (Mat& trial : flat.data) trial.setConstant(2.0);
    try {
      fit_normalization(flat);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Error::Code::degenerate_scale);
    }
  }
}

TEST_CASE("symmetric data centres near zero") {
  Rng rng(60);
  EpochSet set;
  set.sample_rate = 100.0;
  set.channels = {"ch1"};
  Mat trial(1, 1000);
  for (int s = 0; s < 500; ++s) {
    const double v = rng.uniform(0.1, 5.0);
    trial(0, 2 * s) = v;
    trial(0, 2 * s + 1) = -v;
  }
  set.data.push_back(trial);
  set.labels.push_back(Label::TG);
  const NormalizationParams params = fit_normalization(set);
  CHECK(std::abs(params.q50[0]) < 1e-9);
}

TEST_CASE("robust normalization") {
  Rng rng(61);
  EpochSet set = random_epoch_set(rng, 8, 3, 100);
  const NormalizationParams params = fit_normalization(set);
  const EpochSet normed = normalize_robust(set, params);

  SUBCASE("input equal to q50 maps to zero") {
    EpochSet flat = set;
    for (Mat& trial : flat.data) {
      for (int c = 0; c < trial.rows(); ++c) trial.row(c).setConstant(params.q50[c]);
    }
    const EpochSet out = normalize_robust(flat, params);
    for (const Mat& trial : out.data) CHECK(trial.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("affine transforms of the input normalize identically") {
    EpochSet affine = set;
    for (Mat& trial : affine.data) trial = (2.0 * trial).array() + 3.0;
    const NormalizationParams refit = fit_normalization(affine);
    const EpochSet normed_affine = normalize_robust(affine, refit);
    for (int t = 0; t < set.n_trials(); ++t) {
      CHECK((normed.data[t] - normed_affine.data[t]).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("at least 90 percent of pooled samples land in [-1, 1]") {
    for (int c = 0; c < normed.n_channels(); ++c) {
      int inside = 0, total = 0;
      for (const Mat& trial : normed.data) {
        for (int s = 0; s < trial.cols(); ++s) {
          inside += std::abs(trial(c, s)) <= 1.0 ? 1 : 0;
          ++total;
        }
      }
      CHECK(static_cast<double>(inside) / total >= 0.90);
    }
  }

  SUBCASE("refitting on normalized data centres at zero") {
    const NormalizationParams refit = fit_normalization(normed);
    for (int c = 0; c < normed.n_channels(); ++c) {
      CHECK(std::abs(refit.q50[c]) < 1e-9);
    }
  }

  SUBCASE("channel-count mismatch is rejected") {
    NormalizationParams wrong = params;
    wrong.q5.pop_back();
    wrong.q50.pop_back();
    wrong.q95.pop_back();
    CHECK_THROWS_AS(normalize_robust(set, wrong), Error);
  }
}

TEST_CASE("normalization parameters survive a file round trip") {
  TempDir dir;
  Rng rng(62);
  const EpochSet set = random_epoch_set(rng, 4, 3, 50);
  const NormalizationParams params = fit_normalization(set);
  save_normalization(params, dir.file("norm.json"));
  const NormalizationParams loaded = load_normalization(dir.file("norm.json"));
  for (int c = 0; c < 3; ++c) {
    CHECK(loaded.q5[c] == doctest::Approx(params.q5[c]).epsilon(1e-12));
    CHECK(loaded.q50[c] == doctest::Approx(params.q50[c]).epsilon(1e-12));
    CHECK(loaded.q95[c] == doctest::Approx(params.q95[c]).epsilon(1e-12));
  }
}
