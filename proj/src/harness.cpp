#include "privci/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "privci/crt.hpp"
#include "privci/errors.hpp"
#include "privci/gcm.hpp"
#include "privci/synthetic.hpp"

namespace privci {

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::gcm: return "gcm";
    case TestKind::priv_gcm: return "priv-gcm";
    case TestKind::crt: return "crt";
    case TestKind::priv_crt: return "priv-crt";
  }
  throw InvalidConfig("unknown test kind");
}

TestKind test_kind_from_string(const std::string& name) {
  if (name == "gcm") return TestKind::gcm;
  if (name == "priv-gcm") return TestKind::priv_gcm;
  if (name == "crt") return TestKind::crt;
  if (name == "priv-crt") return TestKind::priv_crt;
  throw InvalidConfig("unknown test name: " + name);
}

bool is_private(TestKind kind) {
  return kind == TestKind::priv_gcm || kind == TestKind::priv_crt;
}

bool is_resampling(TestKind kind) {
  return kind == TestKind::crt || kind == TestKind::priv_crt;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw InvalidConfig("n grid is empty");
  for (std::size_t n : cfg.n_grid) {
    if (n < 4) throw InvalidConfig("every n must be >= 4");
  }
  if (cfg.d_grid.empty()) throw InvalidConfig("d grid is empty");
  for (std::size_t d : cfg.d_grid) {
    if (d == 0) throw InvalidConfig("every d must be >= 1");
  }
  if (cfg.s_grid.empty() || cfg.beta_grid.empty()) {
    throw InvalidConfig("s and beta grids must be non-empty");
  }
  if (is_private(cfg.test)) {
    if (cfg.epsilon_grid.empty()) {
      throw InvalidConfig("private test needs an epsilon grid");
    }
    for (double e : cfg.epsilon_grid) {
      if (!(e > 0.0)) throw InvalidConfig("every epsilon must be > 0");
    }
  } else if (!cfg.epsilon_grid.empty()) {
    throw InvalidConfig("epsilon grid only applies to private tests");
  }
  if (is_resampling(cfg.test)) {
    if (cfg.m_grid.empty()) throw InvalidConfig("resampling test needs an m grid");
    for (std::size_t m : cfg.m_grid) {
      if (m == 0) throw InvalidConfig("every m must be >= 1");
    }
  } else if (!cfg.m_grid.empty()) {
    throw InvalidConfig("m grid only applies to resampling tests");
  }
  if (cfg.trials == 0) throw InvalidConfig("trials must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidConfig("alpha in (0,1)");
  if (!(cfg.lambda_floor > 0.0)) throw InvalidConfig("lambda floor must be > 0");
  if (!(cfg.bound_c > 0.0)) throw InvalidConfig("bound_c must be > 0");
}

namespace {

std::uint64_t fold_double(std::uint64_t h, double v) {
  return hash_combine(h, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t cell_key(const ExperimentConfig& cfg, const Cell& cell) {
  std::uint64_t h = mix64(cfg.seed ^ 0xA5C1D3B2E4F60897ULL);
  h = hash_combine(h, static_cast<std::uint64_t>(cfg.test));
  h = hash_combine(h, cell.n);
  h = hash_combine(h, cell.d);
  h = fold_double(h, cell.s);
  h = fold_double(h, cell.beta);
  h = fold_double(h, is_private(cfg.test) ? cell.epsilon : 0.0);
  h = hash_combine(h, cell.m);
  h = fold_double(h, cfg.lambda_floor);
  h = fold_double(h, cfg.bound_c);
  h = hash_combine(h, (cfg.split_mode ? 1u : 0u) | (cfg.fixed_hyperparams ? 2u : 0u));
  return h;
}

FitConfig make_fit_config(const ExperimentConfig& cfg) {
  FitConfig fit;
  fit.lambda_floor = cfg.lambda_floor;
  fit.split_mode = cfg.split_mode;
  if (cfg.fixed_hyperparams) {
    fit.lambda = cfg.lambda_floor;
    fit.bandwidth_factors = {1.0};
  }
  return fit;
}

struct TrialOutcome {
  bool failed = false;
  double p_value = 1.0;
  double statistic = 0.0;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const Cell& cell,
                       const FitConfig& fit, std::size_t trial) {
  TrialOutcome out;
  Rng rng = make_rng(trial_seed(cfg, cell, trial));
  try {
    SynthParams params;
    params.n = cell.n;
    params.d = cell.d;
    params.s = cell.s;
    params.beta = cell.beta;
    params.bound_c = cfg.bound_c;
    auto [ds, truth] = generate(params, rng);
    switch (cfg.test) {
      case TestKind::gcm: {
        const GcmResult r = gcm_test(ds, fit);
        out.p_value = r.p_value;
        out.statistic = r.statistic;
        break;
      }
      case TestKind::priv_gcm: {
        const GcmResult r = priv_gcm_test(ds, cell.epsilon, fit, rng);
        out.p_value = r.p_value;
        out.statistic = r.statistic;
        break;
      }
      case TestKind::crt: {
        const auto cond = make_conditional_model(truth);
        const CrtResult r = crt_test(ds, *cond, cell.m, fit, rng);
        out.p_value = r.p_value;
        out.statistic = r.t_observed;
        break;
      }
      case TestKind::priv_crt: {
        const auto cond = make_conditional_model(truth);
        const CrtResult r = priv_crt_test(ds, *cond, cell.m, cell.epsilon, fit, rng);
        out.p_value = r.p_value;
        out.statistic = r.t_observed;
        break;
      }
    }
  } catch (const Error&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

std::uint64_t trial_seed(const ExperimentConfig& cfg, const Cell& cell,
                         std::size_t trial) {
  return derive_seed(cell_key(cfg, cell), trial, 0);
}

std::vector<CellResult> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const FitConfig fit = make_fit_config(cfg);

  // Unused axes collapse to one placeholder value.
  const std::vector<double> eps_axis =
      is_private(cfg.test) ? cfg.epsilon_grid
                           : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
  const std::vector<std::size_t> m_axis =
      is_resampling(cfg.test) ? cfg.m_grid : std::vector<std::size_t>{0};

  std::vector<CellResult> results;
  for (std::size_t n : cfg.n_grid) {
    for (std::size_t d : cfg.d_grid) {
      for (double s : cfg.s_grid) {
        for (double beta : cfg.beta_grid) {
          for (double eps : eps_axis) {
            for (std::size_t m : m_axis) {
              const Cell cell{n, d, s, beta, eps, m};
              CellResult cr;
              cr.cell = cell;
              cr.trials = cfg.trials;
              std::vector<double> ps;
              std::vector<double> stats;
              std::size_t rejections = 0;
              for (std::size_t t = 0; t < cfg.trials; ++t) {
                const TrialOutcome o = run_trial(cfg, cell, fit, t);
                if (o.failed) {
                  ++cr.failures;
                  continue;
                }
                ps.push_back(o.p_value);
                stats.push_back(o.statistic);
                if (o.p_value <= cfg.alpha) ++rejections;
              }
              const std::size_t denom =
                  cfg.drop_failed ? cfg.trials - cr.failures : cfg.trials;
              if (denom == 0) {
                throw InvalidConfig("all trials failed in a cell");
              }
              const RateCi rc = wilson_interval(rejections, denom);
              cr.rejection_rate = rc.rate;
              cr.ci_low = rc.lo;
              cr.ci_high = rc.hi;
              if (!stats.empty()) cr.mean_statistic = sample_mean(stats);
              if (stats.size() >= 2) cr.var_statistic = sample_variance(stats);
              if (cfg.keep_p_values) cr.p_values = std::move(ps);
              results.push_back(std::move(cr));
            }
          }
        }
      }
    }
  }
  return results;
}

RateCi rejection_rate(std::span<const double> p_values, double alpha) {
  if (p_values.empty()) throw EmptyInput("rejection_rate on empty p-values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha in (0,1)");
  std::size_t hits = 0;
  for (double p : p_values) {
    if (p <= alpha) ++hits;
  }
  return wilson_interval(hits, p_values.size());
}

UniformityResult uniformity_check(std::span<const double> p_values,
                                  std::size_t m) {
  if (m == 0) throw InvalidParameter("uniformity_check needs m >= 1");
  if (p_values.empty()) throw EmptyInput("uniformity_check on empty p-values");
  UniformityResult res;
  res.counts.assign(m + 1, 0);
  const double scale = static_cast<double>(m + 1);
  for (double p : p_values) {
    const double pos = p * scale;  // exact lattice: 1, 2, ..., m+1
    const double k = std::round(pos);
    if (!(k >= 1.0 && k <= scale) || std::abs(pos - k) > 1e-9 * scale) {
      throw OffLatticeValue("p-value off the resampling lattice");
    }
    ++res.counts[static_cast<std::size_t>(k) - 1];
  }
  res.statistic = chi_square_uniform_statistic(res.counts);
  res.critical = chi_square_critical(0.01, m);
  res.pass = res.statistic <= res.critical;
  return res;
}

SensitivityAuditResult sensitivity_audit(double lambda,
                                         std::span<const std::size_t> n_list,
                                         std::size_t trials,
                                         std::uint64_t seed) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("audit needs lambda > 0");
  if (n_list.empty()) throw EmptyInput("audit needs at least one n");
  if (trials == 0) throw InvalidParameter("audit needs trials >= 1");

  SensitivityAuditResult res;
  res.lambda = lambda;
  res.trials = trials;
  const KernelConfig kernel{1.0};  // fixed public bandwidth
  const double d_gcm = sensitivity_gcm(lambda);
  const double d_crt = sensitivity_crt(lambda);

  for (std::size_t li = 0; li < n_list.size(); ++li) {
    const std::size_t n = n_list[li];
    if (n < 2) throw InvalidParameter("audit needs every n >= 2");
    SensitivityAuditRow row;
    row.n = n;
    const double nd = static_cast<double>(n);
    const double pred_bound =
        8.0 * std::sqrt(2.0) / (std::pow(lambda, 1.5) * nd) + 8.0 / (lambda * nd);

    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng = make_rng(derive_seed(seed, li, t));
      std::vector<double> z(n), x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = 2.0 * sample_standard_gaussian(rng);
      for (std::size_t i = 0; i < n; ++i) x[i] = 2.0 * uniform_unit(rng) - 1.0;
      for (std::size_t i = 0; i < n; ++i) y[i] = 2.0 * uniform_unit(rng) - 1.0;

      // Neighbor: one row fully replaced.
      const std::size_t r = static_cast<std::size_t>(rng() % n);
      std::vector<double> z2 = z, x2 = x, y2 = y;
      z2[r] = 2.0 * sample_standard_gaussian(rng);
      x2[r] = 2.0 * uniform_unit(rng) - 1.0;
      y2[r] = 2.0 * uniform_unit(rng) - 1.0;

      const KrrModel f1 = krr_fit(z, 1, x, lambda, kernel);
      const KrrModel g1 = krr_fit(z, 1, y, lambda, kernel);
      const KrrModel f2 = krr_fit(z2, 1, x2, lambda, kernel);
      const KrrModel g2 = krr_fit(z2, 1, y2, lambda, kernel);

      const std::vector<double> rx1 = residuals(f1, z, x);
      const std::vector<double> ry1 = residuals(g1, z, y);
      const std::vector<double> rx2 = residuals(f2, z2, x2);
      const std::vector<double> ry2 = residuals(g2, z2, y2);

      double l1 = 0.0;
      double t1 = 0.0, t2 = 0.0;
      double pred_shift = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        l1 += std::abs(rx1[i] * ry1[i] - rx2[i] * ry2[i]);
        // CRT side: x itself plays the exact bounded x-residual.
        t1 += x[i] * ry1[i];
        t2 += x2[i] * ry2[i];
        const auto zi = std::span<const double>(z).subspan(i, 1);
        pred_shift = std::max(
            pred_shift, std::abs(krr_predict(f1, zi) - krr_predict(f2, zi)));
        pred_shift = std::max(
            pred_shift, std::abs(krr_predict(g1, zi) - krr_predict(g2, zi)));
      }
      row.max_gcm_ratio = std::max(row.max_gcm_ratio, l1 / d_gcm);
      row.max_crt_ratio = std::max(row.max_crt_ratio, std::abs(t1 - t2) / d_crt);
      row.max_pred_ratio = std::max(row.max_pred_ratio, pred_shift / pred_bound);
    }
    if (row.max_gcm_ratio > 1.0) ++row.violations;
    if (row.max_crt_ratio > 1.0) ++row.violations;
    if (row.max_pred_ratio > 1.0) ++row.violations;
    res.rows.push_back(row);
  }
  return res;
}

namespace {

// Fixed-format float: enough digits to round-trip, no locale dependence.
std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["test"] = to_string(cfg.test);
  j["n_grid"] = cfg.n_grid;
  j["d_grid"] = cfg.d_grid;
  j["s_grid"] = cfg.s_grid;
  j["beta_grid"] = cfg.beta_grid;
  if (is_private(cfg.test)) j["epsilon_grid"] = cfg.epsilon_grid;
  if (is_resampling(cfg.test)) j["m_grid"] = cfg.m_grid;
  j["trials"] = cfg.trials;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["lambda_floor"] = cfg.lambda_floor;
  j["split_mode"] = cfg.split_mode;
  j["fixed_hyperparams"] = cfg.fixed_hyperparams;
  j["bound_c"] = cfg.bound_c;
  j["drop_failed"] = cfg.drop_failed;
  return j;
}

}  // namespace

std::string serialize_csv(const ExperimentConfig& cfg,
                          std::span<const CellResult> results) {
  std::ostringstream out;
  out << "schema_version,test,n,d,s,beta,epsilon,m,trials,failures,alpha,"
         "rejection_rate,ci_low,ci_high,mean_statistic,var_statistic\n";
  for (const CellResult& r : results) {
    out << kSchemaVersion << ',' << to_string(cfg.test) << ',' << r.cell.n << ','
        << r.cell.d << ',' << fmt(r.cell.s) << ',' << fmt(r.cell.beta) << ','
        << fmt(r.cell.epsilon) << ','
        << (is_resampling(cfg.test) ? std::to_string(r.cell.m) : std::string())
        << ',' << r.trials << ',' << r.failures << ',' << fmt(cfg.alpha) << ','
        << fmt(r.rejection_rate) << ',' << fmt(r.ci_low) << ',' << fmt(r.ci_high)
        << ',' << fmt(r.mean_statistic) << ',' << fmt(r.var_statistic) << '\n';
  }
  return out.str();
}

std::string serialize_json(const ExperimentConfig& cfg,
                           std::span<const CellResult> results) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(cfg);
  nlohmann::json cells = nlohmann::json::array();
  for (const CellResult& r : results) {
    nlohmann::json c;
    c["n"] = r.cell.n;
    c["d"] = r.cell.d;
    c["s"] = r.cell.s;
    c["beta"] = r.cell.beta;
    if (is_private(cfg.test)) c["epsilon"] = r.cell.epsilon;
    if (is_resampling(cfg.test)) c["m"] = r.cell.m;
    c["trials"] = r.trials;
    c["failures"] = r.failures;
    c["rejection_rate"] = r.rejection_rate;
    c["ci_low"] = r.ci_low;
    c["ci_high"] = r.ci_high;
    c["mean_statistic"] = r.mean_statistic;
    c["var_statistic"] = r.var_statistic;
    if (!r.p_values.empty()) c["p_values"] = r.p_values;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

void write_results(const std::string& path, const ExperimentConfig& cfg,
                   std::span<const CellResult> results, OutputFormat format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidConfig("cannot open output file: " + path);
  f << (format == OutputFormat::csv ? serialize_csv(cfg, results)
                                    : serialize_json(cfg, results));
}

}  // namespace privci
