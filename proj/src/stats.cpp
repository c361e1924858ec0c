#include "graspdec/stats.hpp"

#include "graspdec/riemann.hpp"
#include "graspdec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace graspdec {

namespace {

// P(X >= m) for X ~ Binomial(n, 1/2), exact tail summation.
double binomial_upper_tail(long n, long m) {
  if (m <= 0) return 1.0;
  if (m > n) return 0.0;
  const double log2 = std::log(2.0);
  double log_term = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) -
                    n * log2;
  double term = std::exp(log_term);
  double sum = term;
  for (long j = m + 1; j <= n; ++j) {
    term *= static_cast<double>(n - j + 1) / static_cast<double>(j);
    sum += term;
    if (j > n / 2 && term < sum * 1e-17) break;
  }
  return std::min(sum, 1.0);
}

// Average ranks of |values|, plus the doubled ranks (always integers) and the
// tie group sizes.
struct RankInfo {
  std::vector<double> ranks;
  std::vector<long> doubled;
  std::vector<long> tie_sizes;
};

RankInfo rank_absolute(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::abs(values[i]) < std::abs(values[j]); });
  RankInfo info;
  info.ranks.resize(n);
  info.doubled.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(values[order[j + 1]]) == std::abs(values[order[i]])) ++j;
    // 1-based ranks i+1 .. j+1 share the average; doubling keeps it integral.
    const long doubled = static_cast<long>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      info.doubled[order[k]] = doubled;
      info.ranks[order[k]] = doubled / 2.0;
    }
    info.tie_sizes.push_back(static_cast<long>(j - i + 1));
    i = j + 1;
  }
  return info;
}

double signed_rank_exact(const std::vector<long>& doubled, long w2) {
  const long total = std::accumulate(doubled.begin(), doubled.end(), 0L);
  // counts[s] = number of sign assignments whose positive doubled-rank sum is s.
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  long reach = 0;
  for (long r : doubled) {
    reach += r;
    for (long s = reach; s >= r; --s) counts[s] += counts[s - r];
  }
  double below = 0.0, above = 0.0;
  for (long s = 0; s <= total; ++s) {
    if (s <= w2) below += counts[s];
    if (s >= w2) above += counts[s];
  }
  const double denom = std::pow(2.0, static_cast<double>(doubled.size()));
  const double p = 2.0 * std::min(below, above) / denom;
  return std::min(p, 1.0);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chance_level(long n, double alpha) {
  if (n < 1) {
    throw Error(Error::Code::bad_argument, "need at least one decision");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw Error(Error::Code::bad_argument, "alpha must be in (0, 1)");
  }
  // Smallest k with P(X >= k + 1) <= alpha; monotone, so binary search.
  long lo = 0, hi = n;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (binomial_upper_tail(n, mid + 1) <= alpha) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return static_cast<double>(lo) / static_cast<double>(n);
}

double class_distinctiveness(const std::vector<Mat>& covs_a, const std::vector<Mat>& covs_b) {
  if (covs_a.size() < 2 || covs_b.size() < 2) {
    throw Error(Error::Code::bad_argument, "classDis needs >= 2 trials per class");
  }
  auto log_stats = [](const std::vector<Mat>& covs) {
    std::vector<Mat> logs;
    logs.reserve(covs.size());
    for (const Mat& c : covs) logs.push_back(matrix_log(c));
    Mat mean = Mat::Zero(logs[0].rows(), logs[0].cols());
    for (const Mat& l : logs) mean += l;
    mean /= static_cast<double>(logs.size());
    double dispersion = 0.0;
    for (const Mat& l : logs) dispersion += (l - mean).norm();
    dispersion /= static_cast<double>(logs.size());
    return std::make_pair(mean, dispersion);
  };
  const auto [mean_a, disp_a] = log_stats(covs_a);
  const auto [mean_b, disp_b] = log_stats(covs_b);
  const double numerator = (mean_a - mean_b).norm();
  if (numerator == 0.0) return 0.0;
  const double denom = 0.5 * (disp_a + disp_b);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return numerator / denom;
}

double wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw Error(Error::Code::dimension_mismatch, "paired samples must have equal length");
  }
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  if (n == 0) return 1.0;  // degenerate: no non-zero differences

  const RankInfo info = rank_absolute(diffs);
  double w_plus = 0.0;
  long w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) {
      w_plus += info.ranks[i];
      w2 += info.doubled[i];
    }
  }

  if (n <= 25) {
    return signed_rank_exact(info.doubled, w2);
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  for (long t : info.tie_sizes) {
    tie_term += static_cast<double>(t) * t * t - t;
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return 1.0;
  double delta = w_plus - mean;
  delta -= 0.5 * (delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0));  // continuity correction
  const double z = delta / std::sqrt(var);
  return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
}

double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw Error(Error::Code::bad_argument, "rank-sum groups must be non-empty");
  }
  const std::size_t na = a.size(), nb = b.size();
  std::vector<double> combined = a;
  combined.insert(combined.end(), b.begin(), b.end());

  const std::size_t n = combined.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return combined[i] < combined[j]; });

  std::vector<double> ranks(n);
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && combined[order[j + 1]] == combined[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  double rank_sum_a = 0.0;
  for (std::size_t k = 0; k < na; ++k) rank_sum_a += ranks[k];

  const double dn = static_cast<double>(n);
  const double mean = static_cast<double>(na) * (dn + 1.0) / 2.0;
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) return 1.0;
  double delta = rank_sum_a - mean;
  delta -= 0.5 * (delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0));
  const double z = delta / std::sqrt(var);
  return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
}

BootstrapSummary bootstrap_compare(const std::vector<double>& group_a,
                                   const std::vector<double>& group_b, int reps, int subset_size,
                                   std::uint64_t seed) {
  if (reps <= 0) {
    throw Error(Error::Code::bad_argument, "bootstrap reps must be > 0");
  }
  if (subset_size < 1 || subset_size > static_cast<int>(group_a.size())) {
    throw Error(Error::Code::bad_argument, "subset size must be in [1, |group A|]");
  }
  if (group_b.empty()) {
    throw Error(Error::Code::bad_argument, "group B must be non-empty");
  }
  Rng rng(seed);
  std::vector<double> pvals;
  pvals.reserve(reps);
  std::vector<std::size_t> idx(group_a.size());
  for (int r = 0; r < reps; ++r) {
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first subset_size entries are the draw.
    for (int k = 0; k < subset_size; ++k) {
      const std::size_t j = k + rng.below(idx.size() - k);
      std::swap(idx[k], idx[j]);
    }
    std::vector<double> subset(subset_size);
    for (int k = 0; k < subset_size; ++k) subset[k] = group_a[idx[k]];
    pvals.push_back(wilcoxon_rank_sum(subset, group_b));
  }
  BootstrapSummary summary;
  summary.reps = reps;
  int significant = 0;
  for (double p : pvals) {
    if (p < 0.05) ++significant;
  }
  summary.fraction_significant = static_cast<double>(significant) / reps;
  std::sort(pvals.begin(), pvals.end());
  const std::size_t mid = pvals.size() / 2;
  summary.median_p =
      pvals.size() % 2 == 1 ? pvals[mid] : 0.5 * (pvals[mid - 1] + pvals[mid]);
  return summary;
}

}  // namespace graspdec
