#pragma once

#include <cstddef>
#include <span>

#include "privci/dataset.hpp"
#include "privci/kernel_regression.hpp"
#include "privci/rng.hpp"

namespace privci {

struct GroundTruth;  // defined in synthetic.hpp

struct GcmResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double noise_scale = 0.0;  // Laplace scale added per product; 0 = no noise
  double lambda_used = 0.0;  // private: the public floor; else the fitted lambda
  std::size_t n = 0;         // number of residual products in the statistic
};

// Normalized residual-product statistic
//   T = (n^{-1/2} sum R_i) / sqrt(n^{-1} sum R_i^2 - (n^{-1} sum R_i)^2).
// Throws DegenerateVariance when the denominator vanishes.
[[nodiscard]] double gcm_statistic(std::span<const double> products);

// Two-sided p-value 2(1 - Phi(|t|)), clamped to [0, 1].
[[nodiscard]] double gcm_p_value(double statistic);

// Residual-product test. Fits x ~ z and y ~ z by kernel ridge regression
// (hyperparameters per `fit`), forms the products, and normalizes. In
// split mode the models are fitted on the first half of the rows and the
// products come from the second half.
[[nodiscard]] GcmResult gcm_test(const BoundedDataset& ds, const FitConfig& fit);

// Same pipeline with Laplace noise added to every residual product before
// normalizing. The noise scale is sensitivity_gcm(fit.lambda_floor)/epsilon,
// evaluated at the public floor regardless of the fitted penalty, so the
// privacy accounting never depends on a data-chosen value. The statistic is
// a function of the noised products only, so any further processing of the
// result stays private.
[[nodiscard]] GcmResult priv_gcm_test(const BoundedDataset& ds, double epsilon,
                                      const FitConfig& fit, Rng& rng);

// Asymptotic mean of the private statistic under a synthetic alternative:
// sqrt(n) * rho / sqrt(sigma^2 + 2 (a b delta / epsilon)^2) with delta the
// GCM sensitivity at `lambda` and (a, b) the rescaling divisors. `n` is the
// number of residual products entering the statistic.
[[nodiscard]] double power_shift(const GroundTruth& truth, std::size_t n,
                                 double epsilon, double a, double b,
                                 double lambda);

}  // namespace privci
