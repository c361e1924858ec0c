#pragma once

#include "graspdec/types.hpp"

#include <cstdint>
#include <vector>

namespace graspdec {

// Accuracy threshold for above-chance performance on n binary decisions:
// k/n for the smallest k whose exceedance probability under Binomial(n, 1/2)
// satisfies P(X > k) <= alpha, from the exact binomial tail.
double chance_level(long n, double alpha);

// classDis = delta(Ma, Mb) / (0.5 (sa + sb)): log-Euclidean distance between
// the class mean covariances over the mean within-class dispersion. Two
// zero-dispersion classes with distinct means saturate to +infinity.
double class_distinctiveness(const std::vector<Mat>& covs_a, const std::vector<Mat>& covs_b);

// Two-sided Wilcoxon signed-rank p-value for paired samples. Zero differences
// are dropped, ties get average ranks; the null distribution is exact
// (enumerated by dynamic programming) up to n = 25 and a continuity-corrected
// normal approximation beyond. All differences zero gives p = 1.
double wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value, tie-corrected normal
// approximation with continuity correction. Used for unequal group sizes.
double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b);

struct BootstrapSummary {
  int reps{0};
  double fraction_significant{0.0};  // share of reps with p < 0.05
  double median_p{1.0};
};

// Repeatedly draw subset_size subjects from group A without replacement and
// rank-sum test them against group B; deterministic for a fixed seed.
BootstrapSummary bootstrap_compare(const std::vector<double>& group_a,
                                   const std::vector<double>& group_b, int reps, int subset_size,
                                   std::uint64_t seed);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace graspdec
