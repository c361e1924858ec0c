#include "graspdec/wavelet.hpp"

#include <cmath>

namespace graspdec {

namespace {

// Orthonormal scaling (lowpass reconstruction) filters, sum h[i] = sqrt(2).
const std::vector<double>& scaling_filter(const std::string& family) {
  static const std::vector<double> db1 = {0.7071067811865476, 0.7071067811865476};
  static const std::vector<double> db2 = {0.48296291314469025, 0.83651630373746899,
                                          0.22414386804185735, -0.12940952255092145};
  static const std::vector<double> db4 = {0.23037781330885523, 0.71484657055254153,
                                          0.63088076792959036, -0.027983769416983849,
                                          -0.18703481171888114, 0.030841381835986965,
                                          0.032883011666982945, -0.010597401784997278};
  if (family == "db1" || family == "haar") return db1;
  if (family == "db2") return db2;
  if (family == "db4") return db4;
  throw Error(Error::Code::bad_argument, "unknown wavelet family: " + family);
}

std::vector<double> quadrature_mirror(const std::vector<double>& h) {
  const std::size_t L = h.size();
  std::vector<double> w(L);
  for (std::size_t i = 0; i < L; ++i) {
    w[i] = (i % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - i];
  }
  return w;
}

void check_spec(const WaveletSpec& spec, std::size_t signal_len) {
  if (spec.level < 1) {
    throw Error(Error::Code::bad_argument, "wavelet level must be >= 1");
  }
  const std::size_t min_len = std::size_t{1} << spec.level;
  if (signal_len < min_len) {
    throw Error(Error::Code::signal_too_short,
                "signal of length " + std::to_string(signal_len) + " too short for level " +
                    std::to_string(spec.level));
  }
}

}  // namespace

double WaveletDecomposition::total_energy() const {
  double e = 0.0;
  for (const auto& band : details) {
    for (double c : band) e += c * c;
  }
  for (double c : approx) e += c * c;
  return e;
}

WaveletDecomposition dwt(const std::vector<double>& signal, const WaveletSpec& spec) {
  check_spec(spec, signal.size());
  const std::vector<double>& h = scaling_filter(spec.family);
  const std::vector<double> w = quadrature_mirror(h);
  const int L = static_cast<int>(h.size());

  WaveletDecomposition out;
  std::vector<double> current = signal;
  for (int level = 0; level < spec.level; ++level) {
    const int n = static_cast<int>(current.size());
    out.input_lengths.push_back(n);
    const int m = n + (n % 2);
    current.resize(m, 0.0);
    const int half = m / 2;
    std::vector<double> approx(half, 0.0), detail(half, 0.0);
    for (int k = 0; k < half; ++k) {
      double a = 0.0, d = 0.0;
      for (int i = 0; i < L; ++i) {
        const double v = current[(2 * k + i) % m];
        a += h[i] * v;
        d += w[i] * v;
      }
      approx[k] = a;
      detail[k] = d;
    }
    out.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> idwt(const WaveletDecomposition& decomp, const WaveletSpec& spec) {
  if (decomp.details.size() != decomp.input_lengths.size() ||
      decomp.details.size() != static_cast<std::size_t>(spec.level)) {
    throw Error(Error::Code::dimension_mismatch, "decomposition does not match spec level");
  }
  const std::vector<double>& h = scaling_filter(spec.family);
  const std::vector<double> w = quadrature_mirror(h);
  const int L = static_cast<int>(h.size());

  std::vector<double> current = decomp.approx;
  for (int level = spec.level - 1; level >= 0; --level) {
    const std::vector<double>& detail = decomp.details[level];
    if (detail.size() != current.size()) {
      throw Error(Error::Code::dimension_mismatch, "detail band size mismatch at level " +
                                                       std::to_string(level + 1));
    }
    const int half = static_cast<int>(current.size());
    const int m = 2 * half;
    std::vector<double> rec(m, 0.0);
    for (int k = 0; k < half; ++k) {
      const double a = current[k];
      const double d = detail[k];
      for (int i = 0; i < L; ++i) {
        rec[(2 * k + i) % m] += a * h[i] + d * w[i];
      }
    }
    rec.resize(decomp.input_lengths[level]);  // drop the odd-length pad sample
    current = std::move(rec);
  }
  return current;
}

}  // namespace graspdec
