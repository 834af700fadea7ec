#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "privci/crt.hpp"
#include "privci/dataset.hpp"
#include "privci/kernel_regression.hpp"
#include "privci/rng.hpp"

namespace privci {

// Smooth target whose amplitude shrinks as its frequency grows:
// f_s(t) = exp(-s^2/2) sin(s t).
[[nodiscard]] double complexity_wave(double t, double s);

struct SynthParams {
  std::size_t n = 0;
  std::size_t d = 1;
  double s = 2.0;     // wave complexity
  double beta = 0.0;  // dependence strength; 0 = conditional independence
  double var_z = 4.0;
  double bound_c = 4.0;  // rescaling uses infer_bound(n, bound_c)
};

// Population quantities of the generated model, in raw (pre-rescaling)
// units: conditional means f(z) = f_s(z_1), g(z) = -f_s(z_1), conditional
// variances u = 1 and v = 1 + beta^2, residual-product moments rho = beta
// and sigma = sqrt(1 + 2 beta^2).
struct GroundTruth {
  double s = 2.0;
  double beta = 0.0;
  double cond_var_x = 1.0;
  double cond_var_y = 1.0;
  double rho = 0.0;
  double sigma = 1.0;
  double scale_x = 1.0;  // divisors applied by the generator
  double scale_y = 1.0;
  double raw_residual_bound = 1.0;  // x-noise clip range before rescaling

  [[nodiscard]] double f(std::span<const double> z) const;
  [[nodiscard]] double g(std::span<const double> z) const;
};

// Draws z ~ N(0, var_z)^d row-major, then
//   x = f_s(z_1) + e_x,   y = -f_s(z_1) + e_y + beta * e_x
// with independent standard normal noises, and rescales both responses by
// infer_bound(n, bound_c) with clipping. Draw order is fixed (all z, then
// all e_x, then all e_y) so one seed pins the dataset exactly.
[[nodiscard]] std::pair<BoundedDataset, GroundTruth> generate(
    const SynthParams& params, Rng& rng);

// The true conditional law of the rescaled x given z, for the resampling
// tests: mean f_s(z_1)/scale_x, Gaussian residual clipped to the declared
// bound.
[[nodiscard]] std::unique_ptr<ConditionalModel> make_conditional_model(
    const GroundTruth& truth);

struct FitDiagnostics {
  double a_f = 0.0;  // mean squared error of the x-regression on the truth
  double a_g = 0.0;  // same for the y-regression
  double b_f = 0.0;  // a_f weighted by the conditional variance of y
  double b_g = 0.0;  // a_g weighted by the conditional variance of x
};

// In-sample comparison of fitted regressions against the known conditional
// means, in rescaled units. The products n * a_f and n * b_f must shrink as
// n grows for the tests' null calibration to hold.
[[nodiscard]] FitDiagnostics fit_diagnostics(const KrrModel& f_hat,
                                             const KrrModel& g_hat,
                                             const GroundTruth& truth,
                                             std::span<const double> z,
                                             std::size_t d);

}  // namespace privci
