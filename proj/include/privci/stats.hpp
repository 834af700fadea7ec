#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace privci {

// Standard normal CDF, Phi(t) = 0.5 erfc(-t/sqrt(2)). Absolute error < 1e-14.
[[nodiscard]] double normal_cdf(double t);

// Standard normal quantile (inverse CDF) for p in (0, 1).
// Wichura's PPND16 rational approximation; |error| ~ 1e-15 relative.
[[nodiscard]] double normal_quantile(double p);

// Mean and unbiased (n-1 divisor) sample variance.
[[nodiscard]] double sample_mean(std::span<const double> v);
[[nodiscard]] double sample_variance(std::span<const double> v);

struct RateCi {
  double rate;
  double lo;
  double hi;
};

// Wilson score interval at 95% coverage.
[[nodiscard]] RateCi wilson_interval(std::size_t successes, std::size_t trials);

// One-sample Kolmogorov-Smirnov distance between the empirical CDF of
// `samples` and the continuous CDF `cdf`. Samples need not be sorted.
[[nodiscard]] double ks_distance(std::span<const double> samples,
                                 const std::function<double(double)>& cdf);

// Asymptotic two-sided KS critical value at significance `alpha`:
// sqrt(-ln(alpha/2)/2) / sqrt(n).
[[nodiscard]] double ks_critical(double alpha, std::size_t n);

// Upper-tail chi-square quantile: P(X > result) = alpha for X ~ chi2(dof).
[[nodiscard]] double chi_square_critical(double alpha, std::size_t dof);

// Pearson goodness-of-fit statistic against equal expected counts.
[[nodiscard]] double chi_square_uniform_statistic(std::span<const std::size_t> counts);

}  // namespace privci
