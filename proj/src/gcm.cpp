#include "privci/gcm.hpp"

#include <algorithm>
#include <cmath>

#include "privci/errors.hpp"
#include "privci/stats.hpp"
#include "privci/synthetic.hpp"

namespace privci {

double gcm_statistic(std::span<const double> products) {
  if (products.empty()) throw EmptyInput("gcm_statistic on empty products");
  const double n = static_cast<double>(products.size());
  double sum = 0.0;
  double sumsq = 0.0;
  for (double r : products) {
    sum += r;
    sumsq += r * r;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  if (!(var > 0.0)) throw DegenerateVariance("zero variance in residual products");
  return (sum / std::sqrt(n)) / std::sqrt(var);
}

double gcm_p_value(double statistic) {
  const double p = 2.0 * (1.0 - normal_cdf(std::abs(statistic)));
  return std::clamp(p, 0.0, 1.0);
}

namespace {

struct Products {
  std::vector<double> r;
  double lambda_f;
};

// Shared front half of both tests: two regressions and their residual
// products. Streams 0 and 1 keep the CV draws of the two fits distinct.
Products residual_products(const BoundedDataset& ds, const FitConfig& fit,
                           bool enforce_floor) {
  const std::size_t n = ds.n();
  if (n < 4) throw TooFewRows("need at least 4 rows");
  std::span<const double> x(ds.x);
  std::span<const double> y(ds.y);
  std::span<const double> z(ds.z);

  std::span<const double> fit_z = z, fit_x = x, fit_y = y;
  std::span<const double> eval_z = z, eval_x = x, eval_y = y;
  if (fit.split_mode) {
    const std::size_t half = n / 2;
    fit_z = z.subspan(0, half * ds.d);
    fit_x = x.subspan(0, half);
    fit_y = y.subspan(0, half);
    eval_z = z.subspan(half * ds.d);
    eval_x = x.subspan(half);
    eval_y = y.subspan(half);
  }

  const FittedRegression f = fit_regression(fit_z, ds.d, fit_x, fit, 0,
                                            enforce_floor);
  const FittedRegression g = fit_regression(fit_z, ds.d, fit_y, fit, 1,
                                            enforce_floor);
  const std::vector<double> rx = residuals(f.model, eval_z, eval_x);
  const std::vector<double> ry = residuals(g.model, eval_z, eval_y);

  Products out;
  out.lambda_f = f.model.lambda;
  out.r.resize(rx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) out.r[i] = rx[i] * ry[i];
  return out;
}

}  // namespace

GcmResult gcm_test(const BoundedDataset& ds, const FitConfig& fit) {
  const Products p = residual_products(ds, fit, false);
  GcmResult res;
  res.statistic = gcm_statistic(p.r);
  res.p_value = gcm_p_value(res.statistic);
  res.noise_scale = 0.0;
  res.lambda_used = p.lambda_f;
  res.n = p.r.size();
  return res;
}

GcmResult priv_gcm_test(const BoundedDataset& ds, double epsilon,
                        const FitConfig& fit, Rng& rng) {
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  const Products p = residual_products(ds, fit, true);
  const double delta = sensitivity_gcm(fit.lambda_floor);
  const double scale = std::isinf(epsilon) ? 0.0 : delta / epsilon;
  std::vector<double> noised(p.r.size());
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    noised[i] = p.r[i] + sample_laplace(rng, scale);
  }
  GcmResult res;
  res.statistic = gcm_statistic(noised);
  res.p_value = gcm_p_value(res.statistic);
  res.noise_scale = scale;
  res.lambda_used = fit.lambda_floor;
  res.n = noised.size();
  return res;
}

double power_shift(const GroundTruth& truth, std::size_t n, double epsilon,
                   double a, double b, double lambda) {
  if (n == 0) throw EmptyInput("power_shift with n = 0");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (!(a > 0.0 && b > 0.0)) throw InvalidParameter("scales must be > 0");
  const double delta = sensitivity_gcm(lambda);
  const double noise_sd =
      std::isinf(epsilon) ? 0.0 : std::sqrt(2.0) * a * b * delta / epsilon;
  const double total_sd =
      std::sqrt(truth.sigma * truth.sigma + noise_sd * noise_sd);
  return std::sqrt(static_cast<double>(n)) * truth.rho / total_sd;
}

}  // namespace privci
