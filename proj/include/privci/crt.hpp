#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "privci/dataset.hpp"
#include "privci/kernel_regression.hpp"
#include "privci/rng.hpp"

namespace privci {

// Known conditional law of x given z, used to draw the resampled copies.
class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;
  [[nodiscard]] virtual double mean(std::span<const double> z) const = 0;
  // One draw of x given z. Implementations keep |draw - mean(z)| within
  // residual_bound() so the statistic's sensitivity analysis applies.
  [[nodiscard]] virtual double sample(std::span<const double> z, Rng& rng) const = 0;
  [[nodiscard]] virtual double residual_bound() const = 0;
};

struct CrtResult {
  double p_value = 1.0;
  std::size_t rank = 0;  // count of resampled statistics >= the observed one
  std::size_t m = 0;     // number of resampled copies
  double t_observed = 0.0;
  double delta_t = 0.0;       // statistic sensitivity used; 0 = non-private
  double lambda_floor = 0.0;  // penalty the sensitivity was evaluated at
  std::vector<double> statistics;  // [T_0, T_1..T_m] when keep_statistics
};

// Sum statistic T = sum_i clip(x-residual_i) * y-residual_i, with the
// x-residual divided by the model's residual bound and clipped to [-1, 1].
[[nodiscard]] double crt_statistic(std::span<const double> x,
                                   const ConditionalModel& cond,
                                   std::span<const double> y_residuals,
                                   std::span<const double> z, std::size_t d);

// Resampling test: fits y ~ z once, computes T_0 on the data and T_j on m
// resampled x-columns, and reports p = (1 + #{T_j >= T_0}) / (m + 1).
[[nodiscard]] CrtResult crt_test(const BoundedDataset& ds,
                                 const ConditionalModel& cond, std::size_t m,
                                 const FitConfig& fit, Rng& rng,
                                 bool keep_statistics = false);

// Private variant: identical statistics, then the rank is released through
// rank scores + Report Noisy Max at the given epsilon. The noise scale uses
// sensitivity_crt(fit.lambda_floor). With epsilon = +infinity the output
// matches crt_test exactly for the same incoming generator state.
[[nodiscard]] CrtResult priv_crt_test(const BoundedDataset& ds,
                                      const ConditionalModel& cond, std::size_t m,
                                      double epsilon, const FitConfig& fit,
                                      Rng& rng, bool keep_statistics = false);

// High-probability gap between the private and resampling p-values:
// |p_hat - p*| <= gamma_count / (m + 1) where gamma_count counts statistics
// within gamma = 4 delta_t ln(m / delta) / epsilon of T_0.
[[nodiscard]] double crt_gamma(double delta_t, std::size_t m, double delta,
                               double epsilon);
[[nodiscard]] std::size_t crt_gamma_count(std::span<const double> statistics,
                                          double gamma);

}  // namespace privci
