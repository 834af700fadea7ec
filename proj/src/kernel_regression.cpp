#include "privci/kernel_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "privci/errors.hpp"
#include "privci/rng.hpp"

namespace privci {

namespace {

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

void check_rows(std::span<const double> z, std::size_t d, const char* who) {
  if (d == 0) throw InvalidParameter(std::string(who) + ": d must be >= 1");
  if (z.size() % d != 0) {
    throw DimensionMismatch(std::string(who) + ": z length not a multiple of d");
  }
}

Eigen::MatrixXd gram_matrix(std::span<const double> z, std::size_t d,
                            double bandwidth) {
  const std::size_t n = z.size() / d;
  Eigen::MatrixXd k(n, n);
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  for (std::size_t i = 0; i < n; ++i) {
    k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(-squared_distance(&z[i * d], &z[j * d], d) * inv);
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return k;
}

}  // namespace

double gaussian_kernel(std::span<const double> v, std::span<const double> w,
                       const KernelConfig& cfg) {
  if (v.size() != w.size()) throw DimensionMismatch("kernel inputs differ in length");
  if (v.empty()) throw DimensionMismatch("kernel inputs are empty");
  if (!(cfg.bandwidth > 0.0)) throw InvalidParameter("bandwidth must be > 0");
  return std::exp(-squared_distance(v.data(), w.data(), v.size()) /
                  (2.0 * cfg.bandwidth * cfg.bandwidth));
}

double sensitivity_gcm(double lambda) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("sensitivity at lambda <= 0");
  const double c1 = 2.0 + 2.0 * std::sqrt(2.0 / lambda);
  const double c2 = 8.0 * std::sqrt(2.0) / std::pow(lambda, 1.5) + 8.0 / lambda;
  return c1 * (c1 + c2);
}

double sensitivity_crt(double lambda) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("sensitivity at lambda <= 0");
  const double c1 = 2.0 + 2.0 * std::sqrt(2.0 / lambda);
  const double c2 = 8.0 * std::sqrt(2.0) / std::pow(lambda, 1.5) + 8.0 / lambda;
  return 2.0 * c1 + c2;
}

double prediction_bound(double lambda) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("prediction_bound at lambda <= 0");
  return std::sqrt(2.0 / lambda);
}

double residual_bound(double lambda) { return 1.0 + prediction_bound(lambda); }

KrrModel krr_fit(std::span<const double> z, std::size_t d,
                 std::span<const double> u, double lambda,
                 const KernelConfig& cfg) {
  check_rows(z, d, "krr_fit");
  const std::size_t n = z.size() / d;
  if (n == 0) throw EmptyInput("krr_fit on empty data");
  if (u.size() != n) throw DimensionMismatch("krr_fit: |u| != number of rows");
  if (!(lambda > 0.0)) throw NonPositiveLambda("krr_fit requires lambda > 0");
  if (!(cfg.bandwidth > 0.0)) throw InvalidParameter("bandwidth must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(u[i]) <= 1.0 + 1e-12)) {
      throw BoundViolation(i, "regression target outside [-1, 1]");
    }
  }

  Eigen::MatrixXd a = gram_matrix(z, d, cfg.bandwidth);
  const double ridge = static_cast<double>(n) * lambda / 2.0;
  a.diagonal().array() += ridge;
  const Eigen::Map<const Eigen::VectorXd> rhs(u.data(),
                                              static_cast<Eigen::Index>(n));

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    // One retry with a tiny jitter; the ridge already makes the system
    // positive definite in exact arithmetic.
    a.diagonal().array() += 1e-10;
    llt.compute(a);
    if (llt.info() != Eigen::Success) {
      throw SolveFailure("Cholesky factorization failed");
    }
  }
  const Eigen::VectorXd alpha = llt.solve(rhs);

  KrrModel model;
  model.alpha.assign(alpha.data(), alpha.data() + n);
  model.train_z.assign(z.begin(), z.end());
  model.d = d;
  model.kernel = cfg;
  model.lambda = lambda;
  return model;
}

double krr_predict(const KrrModel& model, std::span<const double> z) {
  if (z.size() != model.d) throw DimensionMismatch("krr_predict: wrong input dim");
  const std::size_t n = model.alpha.size();
  const double inv = 1.0 / (2.0 * model.kernel.bandwidth * model.kernel.bandwidth);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += model.alpha[i] *
         std::exp(-squared_distance(&model.train_z[i * model.d], z.data(),
                                    model.d) *
                  inv);
  }
  return s;
}

std::vector<double> residuals(const KrrModel& model, std::span<const double> z,
                              std::span<const double> u) {
  check_rows(z, model.d, "residuals");
  const std::size_t n = z.size() / model.d;
  if (u.size() != n) throw DimensionMismatch("residuals: |u| != number of rows");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] - krr_predict(model, z.subspan(i * model.d, model.d));
  }
  return out;
}

double rkhs_norm(const KrrModel& model) {
  const std::size_t n = model.alpha.size();
  const Eigen::MatrixXd k = gram_matrix(model.train_z, model.d,
                                        model.kernel.bandwidth);
  const Eigen::Map<const Eigen::VectorXd> a(model.alpha.data(),
                                            static_cast<Eigen::Index>(n));
  const double sq = a.dot(k * a);
  return std::sqrt(std::max(0.0, sq));
}

double median_pairwise_distance(std::span<const double> z, std::size_t d,
                                std::size_t cap) {
  check_rows(z, d, "median_pairwise_distance");
  const std::size_t n = std::min(z.size() / d, cap);
  if (n < 2) throw EmptyInput("median distance needs at least two rows");
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist.push_back(std::sqrt(squared_distance(&z[i * d], &z[j * d], d)));
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid),
                   dist.end());
  return dist[mid];
}

CvChoice cv_select(std::span<const double> z, std::size_t d,
                   std::span<const double> u,
                   std::span<const double> lambda_grid,
                   std::span<const double> bandwidth_grid, std::size_t folds,
                   double lambda_floor, std::uint64_t seed) {
  check_rows(z, d, "cv_select");
  const std::size_t n = z.size() / d;
  if (u.size() != n) throw DimensionMismatch("cv_select: |u| != number of rows");
  if (lambda_grid.empty() || bandwidth_grid.empty()) {
    throw EmptyGrid("cv_select needs non-empty grids");
  }
  if (folds < 2) throw InvalidParameter("cv_select needs folds >= 2");
  if (n < folds) throw InvalidParameter("cv_select needs n >= folds");
  for (double lam : lambda_grid) {
    if (lam < lambda_floor) {
      throw LambdaBelowFloor("grid contains lambda below the public floor");
    }
  }
  for (double bw : bandwidth_grid) {
    if (!(bw > 0.0)) throw InvalidParameter("bandwidth grid must be positive");
  }

  // Contiguous blocks of one seeded shuffle; identical seed => identical folds.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  CvChoice best;
  bool have_best = false;
  std::vector<double> train_z, train_u, test_z, test_u;
  for (double lam : lambda_grid) {
    for (double bw : bandwidth_grid) {
      double sq_err = 0.0;
      for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t lo = f * n / folds;
        const std::size_t hi = (f + 1) * n / folds;
        train_z.clear();
        train_u.clear();
        test_z.clear();
        test_u.clear();
        for (std::size_t pos = 0; pos < n; ++pos) {
          const std::size_t i = order[pos];
          auto& dst_z = (pos >= lo && pos < hi) ? test_z : train_z;
          auto& dst_u = (pos >= lo && pos < hi) ? test_u : train_u;
          dst_z.insert(dst_z.end(), z.begin() + static_cast<std::ptrdiff_t>(i * d),
                       z.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
          dst_u.push_back(u[i]);
        }
        const KrrModel m = krr_fit(train_z, d, train_u, lam, {bw});
        for (std::size_t t = 0; t < test_u.size(); ++t) {
          const double pred = krr_predict(
              m, std::span<const double>(test_z).subspan(t * d, d));
          sq_err += (test_u[t] - pred) * (test_u[t] - pred);
        }
      }
      const double err = sq_err / static_cast<double>(n);
      // Strict improvement keeps the earliest grid entry on ties.
      if (!have_best || err < best.cv_error) {
        best = CvChoice{lam, KernelConfig{bw}, err};
        have_best = true;
      }
    }
  }
  return best;
}

FittedRegression fit_regression(std::span<const double> z, std::size_t d,
                                std::span<const double> u, const FitConfig& cfg,
                                std::uint64_t stream, bool enforce_floor) {
  if (cfg.lambda && !(*cfg.lambda > 0.0)) {
    throw NonPositiveLambda("explicit lambda must be > 0");
  }
  if (enforce_floor && cfg.lambda && *cfg.lambda < cfg.lambda_floor) {
    throw LambdaBelowFloor("explicit lambda below the public floor");
  }
  if (cfg.lambda && cfg.bandwidth) {
    return {krr_fit(z, d, u, *cfg.lambda, {*cfg.bandwidth}), 0.0};
  }

  std::vector<double> lambda_grid;
  if (cfg.lambda) {
    lambda_grid.push_back(*cfg.lambda);
  } else {
    for (double mul : cfg.lambda_multipliers) {
      lambda_grid.push_back(cfg.lambda_floor * mul);
    }
  }
  std::vector<double> bandwidth_grid;
  if (cfg.bandwidth) {
    bandwidth_grid.push_back(*cfg.bandwidth);
  } else {
    const double med = median_pairwise_distance(z, d);
    for (double f : cfg.bandwidth_factors) {
      if (med * f > 0.0) bandwidth_grid.push_back(med * f);
    }
    if (bandwidth_grid.empty()) bandwidth_grid.push_back(1.0);
  }

  if (lambda_grid.size() == 1 && bandwidth_grid.size() == 1) {
    // Nothing to select; skip the CV passes entirely.
    if (enforce_floor && lambda_grid[0] < cfg.lambda_floor) {
      throw LambdaBelowFloor("lambda below the public floor");
    }
    return {krr_fit(z, d, u, lambda_grid[0], {bandwidth_grid[0]}), 0.0};
  }

  const double floor = enforce_floor ? cfg.lambda_floor : 0.0;
  const CvChoice choice =
      cv_select(z, d, u, lambda_grid, bandwidth_grid, cfg.cv_folds, floor,
                derive_seed(cfg.cv_seed, stream, 0));
  return {krr_fit(z, d, u, choice.lambda, choice.kernel), choice.cv_error};
}

}  // namespace privci
