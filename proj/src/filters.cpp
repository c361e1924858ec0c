#include "graspdec/fft.hpp"
#include "graspdec/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace graspdec {

namespace {

using cd = std::complex<double>;

struct Zpk {
  std::vector<cd> zeros;
  std::vector<cd> poles;
  double gain{1.0};
};

cd response_at(const Zpk& f, double omega) {
  const cd z = std::polar(1.0, omega);
  cd h(f.gain, 0.0);
  for (const cd& zero : f.zeros) h *= (z - zero);
  for (const cd& pole : f.poles) h /= (z - pole);
  return h;
}

cd bilinear(const cd& s, double fs) {
  const double k = 2.0 * fs;
  return (k + s) / (k - s);
}

Zpk design_bandpass(double f_lo, double f_hi, int order, double fs) {
  const double w1 = 2.0 * fs * std::tan(M_PI * f_lo / fs);
  const double w2 = 2.0 * fs * std::tan(M_PI * f_hi / fs);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  Zpk out;
  for (int k = 0; k < order; ++k) {
    // Butterworth lowpass prototype pole on the unit circle, left half plane.
    const double theta = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
    const cd p = std::polar(1.0, theta);
    const cd a = bw * p * 0.5;
    const cd disc = std::sqrt(a * a - w0 * w0);
    out.poles.push_back(bilinear(a + disc, fs));
    out.poles.push_back(bilinear(a - disc, fs));
  }
  // Lowpass-to-bandpass puts `order` zeros at s=0 (z=1); the remaining
  // degree maps to z=-1 under the bilinear transform.
  for (int k = 0; k < order; ++k) {
    out.zeros.push_back(cd(1.0, 0.0));
    out.zeros.push_back(cd(-1.0, 0.0));
  }
  const double wc = 2.0 * std::atan(w0 / (2.0 * fs));
  out.gain = 1.0 / std::abs(response_at(out, wc));
  return out;
}

Zpk design_notch(double f0, double q, double fs) {
  const double w0 = 2.0 * M_PI * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  Zpk out;
  out.zeros.push_back(std::polar(1.0, w0));
  out.zeros.push_back(std::polar(1.0, -w0));
  const double re = c / (1.0 + alpha);
  const double im2 = (1.0 - alpha * alpha - c * c);
  const double im = std::sqrt(std::max(0.0, im2)) / (1.0 + alpha);
  out.poles.push_back(cd(re, im));
  out.poles.push_back(cd(re, -im));
  out.gain = 1.0 / (1.0 + alpha);
  return out;
}

Zpk design(const FilterSpec& spec, double fs) {
  const double nyquist = fs / 2.0;
  if (spec.kind == FilterSpec::Kind::notch) {
    if (!(spec.f0 > 0.0) || spec.f0 >= nyquist) {
      throw Error(Error::Code::bad_argument, "notch frequency must be in (0, Nyquist)");
    }
    if (spec.order != 2) {
      throw Error(Error::Code::bad_argument, "notch filter is second order");
    }
    if (!(spec.q > 0.5)) {
      throw Error(Error::Code::bad_argument, "notch Q must exceed 0.5");
    }
    return design_notch(spec.f0, spec.q, fs);
  }
  if (!(spec.f_lo > 0.0) || !(spec.f_hi > spec.f_lo) || spec.f_hi >= nyquist) {
    throw Error(Error::Code::bad_argument, "bandpass edges must satisfy 0 < lo < hi < Nyquist");
  }
  if (spec.order < 1) {
    throw Error(Error::Code::bad_argument, "filter order must be >= 1");
  }
  return design_bandpass(spec.f_lo, spec.f_hi, spec.order, fs);
}

// Odd (point-symmetric) extension sample, valid a short distance past the ends.
double sample_odd_ext(const std::vector<double>& x, long j) {
  const long n = static_cast<long>(x.size());
  if (j >= 0 && j < n) return x[j];
  if (j < 0) {
    const long r = std::min(-j, n - 1);
    return 2.0 * x[0] - x[r];
  }
  const long r = std::max<long>(0, 2 * n - 2 - j);
  return 2.0 * x[n - 1] - x[r];
}

// Samples past the kernel's decay length contribute nothing at double
// precision; this bounds the FFT size and the wrap-around error.
std::size_t decay_pad(const Zpk& f) {
  double rmax = 0.0;
  for (const cd& p : f.poles) rmax = std::max(rmax, std::abs(p));
  rmax = std::min(rmax, 0.99995);
  const double needed = 30.0 / -std::log(rmax);
  return std::min<std::size_t>(1 << 16, std::max<std::size_t>(64, static_cast<std::size_t>(needed)));
}

std::vector<double> filter_zero_phase(const std::vector<double>& x, const Zpk& f) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = decay_pad(f);
  const std::size_t ext = std::min(n - 1, pad);
  const std::size_t m = next_pow2(n + 2 * ext + 2 * pad);

  std::vector<cd> buf(m, cd(0.0, 0.0));
  for (std::size_t i = 0; i < n + 2 * ext; ++i) {
    buf[i] = sample_odd_ext(x, static_cast<long>(i) - static_cast<long>(ext));
  }
  fft(buf, false);
  for (std::size_t k = 0; k < m; ++k) {
    const double omega = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(m);
    const double mag = std::abs(response_at(f, omega));
    buf[k] *= mag * mag;
  }
  fft(buf, true);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = buf[ext + i].real();
  return y;
}

struct Biquad {
  double b0, b1, b2, a1, a2;
};

std::vector<Biquad> to_sections(const Zpk& f) {
  auto split = [](const std::vector<cd>& roots) {
    std::vector<cd> complex_reps;
    std::vector<double> reals;
    for (const cd& r : roots) {
      if (std::abs(r.imag()) > 1e-12) {
        if (r.imag() > 0.0) complex_reps.push_back(r);
      } else {
        reals.push_back(r.real());
      }
    }
    std::sort(reals.begin(), reals.end());
    return std::make_pair(complex_reps, reals);
  };

  auto [cpoles, rpoles] = split(f.poles);
  auto [czeros, rzeros] = split(f.zeros);

  // Quadratic factors [1, c1, c2]: conjugate pairs first, then real roots
  // paired from opposite ends of the sorted list.
  auto quadratics = [](std::vector<cd>& cs, std::vector<double>& rs) {
    std::vector<std::pair<double, double>> out;
    for (const cd& r : cs) out.emplace_back(-2.0 * r.real(), std::norm(r));
    std::size_t lo = 0, hi = rs.size();
    while (hi - lo >= 2) {
      const double r1 = rs[lo++];
      const double r2 = rs[--hi];
      out.emplace_back(-(r1 + r2), r1 * r2);
    }
    if (hi > lo) out.emplace_back(-rs[lo], 0.0);  // first-order leftover
    return out;
  };

  auto pole_q = quadratics(cpoles, rpoles);
  auto zero_q = quadratics(czeros, rzeros);

  std::vector<Biquad> sections;
  const std::size_t count = std::max(pole_q.size(), zero_q.size());
  for (std::size_t i = 0; i < count; ++i) {
    Biquad s{1.0, 0.0, 0.0, 0.0, 0.0};
    if (i < zero_q.size()) {
      s.b1 = zero_q[i].first;
      s.b2 = zero_q[i].second;
    }
    if (i < pole_q.size()) {
      s.a1 = pole_q[i].first;
      s.a2 = pole_q[i].second;
    }
    if (i == 0) {
      s.b0 *= f.gain;
      s.b1 *= f.gain;
      s.b2 *= f.gain;
    }
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> filter_causal(const std::vector<double>& x, const Zpk& f) {
  const auto sections = to_sections(f);
  std::vector<double> y = x;
  for (const Biquad& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

}  // namespace

FilterSpec notch_spec(double f0, double q) {
  FilterSpec spec;
  spec.kind = FilterSpec::Kind::notch;
  spec.f0 = f0;
  spec.q = q;
  spec.order = 2;
  return spec;
}

FilterSpec bandpass_spec(double f_lo, double f_hi, int order) {
  FilterSpec spec;
  spec.kind = FilterSpec::Kind::bandpass;
  spec.f_lo = f_lo;
  spec.f_hi = f_hi;
  spec.order = order;
  return spec;
}

std::vector<double> filter_signal(const std::vector<double>& x, const FilterSpec& spec,
                                  double sample_rate) {
  if (!(sample_rate > 0.0)) {
    throw Error(Error::Code::bad_argument, "sample rate must be > 0");
  }
  const Zpk f = design(spec, sample_rate);
  return spec.zero_phase ? filter_zero_phase(x, f) : filter_causal(x, f);
}

EpochSet apply_filter(const EpochSet& set, const FilterSpec& spec) {
  set.validate();
  const Zpk f = design(spec, set.sample_rate);
  EpochSet out = set;
  for (Mat& trial : out.data) {
    for (int c = 0; c < trial.rows(); ++c) {
      std::vector<double> row(trial.cols());
      for (int s = 0; s < trial.cols(); ++s) row[s] = trial(c, s);
      const std::vector<double> filtered =
          spec.zero_phase ? filter_zero_phase(row, f) : filter_causal(row, f);
      for (int s = 0; s < trial.cols(); ++s) trial(c, s) = filtered[s];
    }
  }
  return out;
}

EpochSet resample(const EpochSet& set, double target_rate) {
  set.validate();
  if (!(target_rate > 0.0)) {
    throw Error(Error::Code::bad_argument, "target rate must be > 0");
  }
  if (target_rate == set.sample_rate) return set;
  if (target_rate > set.sample_rate) {
    throw Error(Error::Code::bad_argument, "target rate above source rate");
  }
  const double ratio = set.sample_rate / target_rate;
  const int factor = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - factor) > 1e-9) {
    throw Error(Error::Code::bad_argument, "target rate must divide source rate");
  }

  // 64-tap Hamming-windowed sinc, cutoff 0.4 x target rate, unity DC gain.
  constexpr int kTaps = 64;
  const double fc = 0.4 * target_rate / set.sample_rate;  // normalized (cycles/sample)
  std::vector<double> h(kTaps);
  double sum = 0.0;
  for (int k = 0; k < kTaps; ++k) {
    const double t = k - (kTaps - 1) / 2.0;
    const double sinc = t == 0.0 ? 1.0 : std::sin(2.0 * M_PI * fc * t) / (2.0 * M_PI * fc * t);
    const double window = 0.54 - 0.46 * std::cos(2.0 * M_PI * k / (kTaps - 1));
    h[k] = 2.0 * fc * sinc * window;
    sum += h[k];
  }
  for (double& v : h) v /= sum;

  const int n_in = set.n_samples();
  const int n_out = (n_in + factor - 1) / factor;
  EpochSet out;
  out.sample_rate = target_rate;
  out.channels = set.channels;
  out.meta = set.meta;
  out.labels = set.labels;
  out.data.reserve(set.data.size());
  for (const Mat& trial : set.data) {
    Mat dec(trial.rows(), n_out);
    for (int c = 0; c < trial.rows(); ++c) {
      std::vector<double> row(n_in);
      for (int s = 0; s < n_in; ++s) row[s] = trial(c, s);
      for (int j = 0; j < n_out; ++j) {
        const long center = static_cast<long>(j) * factor;
        double acc = 0.0;
        for (int k = 0; k < kTaps; ++k) {
          acc += h[k] * sample_odd_ext(row, center + kTaps / 2 - k);
        }
        dec(c, j) = acc;
      }
    }
    out.data.push_back(std::move(dec));
  }
  return out;
}

}  // namespace graspdec
