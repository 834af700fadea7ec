#include "privci/crt.hpp"

#include <algorithm>
#include <cmath>

#include "privci/dp.hpp"
#include "privci/errors.hpp"

namespace privci {

double crt_statistic(std::span<const double> x, const ConditionalModel& cond,
                     std::span<const double> y_residuals,
                     std::span<const double> z, std::size_t d) {
  if (d == 0) throw InvalidParameter("crt_statistic: d must be >= 1");
  const std::size_t n = x.size();
  if (y_residuals.size() != n || z.size() != n * d) {
    throw DimensionMismatch("crt_statistic: column lengths disagree");
  }
  const double rb = cond.residual_bound();
  if (!(rb > 0.0)) throw InvalidParameter("conditional residual bound must be > 0");
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rx =
        std::clamp((x[i] - cond.mean(z.subspan(i * d, d))) / rb, -1.0, 1.0);
    t += rx * y_residuals[i];
  }
  return t;
}

namespace {

struct Statistics {
  std::vector<double> t;  // t[0] observed, t[1..m] resampled
  double lambda_g;
};

// Shared by both tests so their statistic paths consume randomness
// identically: one base draw from the caller's generator seeds the per-copy
// generators, and the y-regression CV uses its own seed from `fit`.
Statistics compute_statistics(const BoundedDataset& ds,
                              const ConditionalModel& cond, std::size_t m,
                              const FitConfig& fit, bool enforce_floor,
                              Rng& rng) {
  if (m == 0) throw InvalidParameter("need at least one resampled copy");
  const std::size_t n = ds.n();
  if (n < 4) throw TooFewRows("need at least 4 rows");
  const std::uint64_t base = rng();

  const FittedRegression g =
      fit_regression(ds.z, ds.d, ds.y, fit, 1, enforce_floor);
  const std::vector<double> ry = residuals(g.model, ds.z, ds.y);

  Statistics out;
  out.lambda_g = g.model.lambda;
  out.t.reserve(m + 1);
  out.t.push_back(crt_statistic(ds.x, cond, ry, ds.z, ds.d));
  std::vector<double> xj(n);
  for (std::size_t j = 1; j <= m; ++j) {
    Rng copy_rng = make_rng(derive_seed(base, j, 0));
    for (std::size_t i = 0; i < n; ++i) {
      xj[i] = cond.sample(std::span<const double>(ds.z).subspan(i * ds.d, ds.d),
                          copy_rng);
    }
    out.t.push_back(crt_statistic(xj, cond, ry, ds.z, ds.d));
  }
  return out;
}

}  // namespace

CrtResult crt_test(const BoundedDataset& ds, const ConditionalModel& cond,
                   std::size_t m, const FitConfig& fit, Rng& rng,
                   bool keep_statistics) {
  Statistics st = compute_statistics(ds, cond, m, fit, false, rng);
  std::size_t rank = 0;
  for (std::size_t j = 1; j <= m; ++j) {
    if (st.t[j] >= st.t[0]) ++rank;
  }
  CrtResult res;
  res.p_value = static_cast<double>(1 + rank) / static_cast<double>(m + 1);
  res.rank = rank;
  res.m = m;
  res.t_observed = st.t[0];
  res.delta_t = 0.0;
  res.lambda_floor = fit.lambda_floor;
  if (keep_statistics) res.statistics = std::move(st.t);
  return res;
}

CrtResult priv_crt_test(const BoundedDataset& ds, const ConditionalModel& cond,
                        std::size_t m, double epsilon, const FitConfig& fit,
                        Rng& rng, bool keep_statistics) {
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (fit.lambda && *fit.lambda < fit.lambda_floor) {
    throw LambdaBelowFloor("explicit lambda below the public floor");
  }
  Statistics st = compute_statistics(ds, cond, m, fit, true, rng);
  const double delta_t = sensitivity_crt(fit.lambda_floor);
  const std::size_t noisy_rank = private_rank(st.t, 0, delta_t, epsilon, rng);
  CrtResult res;
  res.p_value = static_cast<double>(1 + noisy_rank) / static_cast<double>(m + 1);
  res.rank = noisy_rank;
  res.m = m;
  res.t_observed = st.t[0];
  res.delta_t = delta_t;
  res.lambda_floor = fit.lambda_floor;
  if (keep_statistics) res.statistics = std::move(st.t);
  return res;
}

double crt_gamma(double delta_t, std::size_t m, double delta, double epsilon) {
  if (!(delta_t > 0.0)) throw InvalidParameter("delta_t must be > 0");
  if (m == 0) throw InvalidParameter("m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta in (0,1)");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (std::isinf(epsilon)) return 0.0;
  return 4.0 * delta_t * std::log(static_cast<double>(m) / delta) / epsilon;
}

std::size_t crt_gamma_count(std::span<const double> statistics, double gamma) {
  if (statistics.empty()) throw EmptyInput("gamma count on empty statistics");
  if (!(gamma >= 0.0)) throw InvalidParameter("gamma must be >= 0");
  const double t0 = statistics[0];
  std::size_t count = 0;
  for (std::size_t j = 1; j < statistics.size(); ++j) {
    if (std::abs(statistics[j] - t0) <= gamma) ++count;
  }
  return count;
}

}  // namespace privci
