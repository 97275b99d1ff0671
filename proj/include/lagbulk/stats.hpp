#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace lagbulk::stats {

/// Pairwise (cascade) summation; the result depends only on the order of the
/// input, never on how the work was scheduled.
double pairwise_sum(std::span<const double> values);

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double var = 0.0;  // unbiased; 0 when n < 2
  double se = 0.0;   // sqrt(var / n)
};

/// Two-pass moments with pairwise sums.
Moments moments(std::span<const double> values);

/// sup_x |F_a(x) - F_b(x)| over the pooled sample, ties handled by stepping
/// both empirical functions past equal values together.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sup_x |F_n(x) - F(x)| for a continuous distribution function F.
double ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

/// Asymptotic p-values with Stephens' small-sample correction.
double ks_p_value(double d, std::size_t n);
double ks_p_value(double d, std::size_t n1, std::size_t n2);

}  // namespace lagbulk::stats
