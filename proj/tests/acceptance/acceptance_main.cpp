// Acceptance gate: one check per release criterion, one [PASS]/[FAIL] line
// each, exit code = number of failures. The Monte Carlo checks run at desk
// scale with tolerances sized for their trial counts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "privci/crt.hpp"
#include "privci/dataset.hpp"
#include "privci/dp.hpp"
#include "privci/errors.hpp"
#include "privci/gcm.hpp"
#include "privci/harness.hpp"
#include "privci/kernel_regression.hpp"
#include "privci/rng.hpp"
#include "privci/stats.hpp"
#include "privci/synthetic.hpp"

using namespace privci;

namespace {

constexpr std::uint64_t kSeedBase = 0xACCE97ED0001ULL;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

FitConfig fixed_fit(double lambda_floor, bool split) {
  FitConfig fit;
  fit.lambda_floor = lambda_floor;
  fit.lambda = lambda_floor;
  fit.bandwidth_factors = {1.0};
  fit.split_mode = split;
  return fit;
}

const CellResult& cell_with_beta(const std::vector<CellResult>& cells, double beta) {
  for (const auto& c : cells) {
    if (c.cell.beta == beta) return c;
  }
  throw InvalidConfig("no cell at the requested beta");
}

const CellResult& cell_with_m(const std::vector<CellResult>& cells, std::size_t m) {
  for (const auto& c : cells) {
    if (c.cell.m == m) return c;
  }
  throw InvalidConfig("no cell at the requested m");
}

// 1. Private residual-product test keeps its level on null data.
Outcome check_null_calibration() {
  ExperimentConfig cfg;
  cfg.test = TestKind::priv_gcm;
  cfg.n_grid = {1000};
  cfg.epsilon_grid = {7.0};
  cfg.trials = 500;
  cfg.seed = derive_seed(kSeedBase, 1, 0);
  cfg.fixed_hyperparams = true;
  const auto cells = run_experiment(cfg);
  const double rate = cells.at(0).rejection_rate;
  const bool pass = rate >= 0.02 && rate <= 0.09 && cells.at(0).failures == 0;
  return {pass, fmt("null rejection rate %.3f, want [0.020, 0.090] "
                    "(n=1000, eps=7, alpha=0.05, 500 trials)",
                    rate)};
}

// 2. The noised statistic is standard normal under the null.
Outcome check_gaussian_limit() {
  SynthParams params;
  params.n = 2000;
  const FitConfig fit = fixed_fit(10.0, false);
  const std::size_t trials = 500;
  std::vector<double> stats(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(derive_seed(kSeedBase, 2, t));
    const auto [ds, truth] = generate(params, rng);
    stats[t] = priv_gcm_test(ds, 7.0, fit, rng).statistic;
  }
  const double ks = ks_distance(stats, [](double t) { return normal_cdf(t); });
  const double crit = ks_critical(0.01, trials);
  const double var = sample_variance(stats);
  const bool pass = ks < crit && var >= 0.8 && var <= 1.25;
  return {pass, fmt("null statistic KS %.4f vs critical %.4f, variance %.3f "
                    "want [0.80, 1.25] (n=2000, eps=7, 500 trials)",
                    ks, crit, var)};
}

// 3. Under dependence the statistic centers on the predicted mean shift.
Outcome check_power_shift() {
  SynthParams params;
  params.n = 5000;
  params.beta = 0.5;
  const FitConfig fit = fixed_fit(10.0, true);
  const std::size_t trials = 200;
  const double epsilon = 7.0;
  std::vector<double> stats(trials);
  double predicted = 0.0;
  std::size_t products = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(derive_seed(kSeedBase, 3, t));
    const auto [ds, truth] = generate(params, rng);
    const GcmResult res = priv_gcm_test(ds, epsilon, fit, rng);
    stats[t] = res.statistic;
    products = res.n;
    predicted = power_shift(truth, res.n, epsilon, truth.scale_x, truth.scale_y,
                            fit.lambda_floor);
  }
  const double mean = sample_mean(stats);
  const double se = std::sqrt(sample_variance(stats) / double(trials));
  const bool pass = std::abs(mean - predicted) <= 3.0 * se;
  return {pass, fmt("statistic mean %.3f vs predicted shift %.3f, |diff| %.3f "
                    "<= 3se %.3f (split n=5000, %zu products, beta=0.5, "
                    "eps=7, 200 trials)",
                    mean, predicted, std::abs(mean - predicted), 3.0 * se,
                    products)};
}

// 4. Power grows with the dependence strength and saturates.
Outcome check_power_monotonicity() {
  ExperimentConfig cfg;
  cfg.test = TestKind::priv_gcm;
  cfg.n_grid = {2500};
  cfg.beta_grid = {0.0, 0.5, 1.0, 1.5};
  cfg.epsilon_grid = {7.0};
  cfg.trials = 100;
  cfg.seed = derive_seed(kSeedBase, 4, 0);
  cfg.fixed_hyperparams = true;
  cfg.bound_c = 0.75;
  const auto cells = run_experiment(cfg);
  std::vector<double> rates;
  rates.reserve(cfg.beta_grid.size());
  for (double beta : cfg.beta_grid)
    rates.push_back(cell_with_beta(cells, beta).rejection_rate);
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    if (rates[i + 1] < rates[i] - 0.03) monotone = false;
  }
  const bool pass = monotone && rates.back() >= 0.9;
  return {pass, fmt("rejection rates %.2f -> %.2f -> %.2f -> %.2f over "
                    "beta {0, 0.5, 1, 1.5}, want nondecreasing (0.03 "
                    "tolerance) and >= 0.90 at 1.5 (n=2500, eps=7, 100 "
                    "trials each)",
                    rates[0], rates[1], rates[2], rates[3])};
}

// 5. Resampling p-values are uniform on their lattice under the null; the
//    private variant keeps its level.
Outcome check_resampling_null() {
  ExperimentConfig cfg;
  cfg.test = TestKind::crt;
  cfg.n_grid = {1000};
  cfg.m_grid = {19};
  cfg.trials = 500;
  cfg.seed = derive_seed(kSeedBase, 5, 0);
  cfg.fixed_hyperparams = true;
  cfg.bound_c = 2.0;
  cfg.keep_p_values = true;
  const auto cells = run_experiment(cfg);
  const UniformityResult uni = uniformity_check(cells.at(0).p_values, 19);

  ExperimentConfig pcfg = cfg;
  pcfg.test = TestKind::priv_crt;
  pcfg.epsilon_grid = {2.0};
  pcfg.keep_p_values = false;
  pcfg.seed = derive_seed(kSeedBase, 5, 1);
  const auto pcells = run_experiment(pcfg);
  const double rate = pcells.at(0).rejection_rate;

  const bool pass = uni.pass && rate >= 0.02 && rate <= 0.09 &&
                    cells.at(0).failures == 0 && pcells.at(0).failures == 0;
  return {pass, fmt("lattice chi-square %.1f vs critical %.1f, private null "
                    "rate %.3f want [0.020, 0.090] (n=1000, m=19, eps=2, "
                    "500 trials)",
                    uni.statistic, uni.critical, rate)};
}

// 6. Private resampling power: high at strong dependence, ordered in between.
Outcome check_resampling_power() {
  ExperimentConfig cfg;
  cfg.test = TestKind::priv_crt;
  cfg.n_grid = {1000};
  cfg.beta_grid = {0.0, 0.5, 1.5};
  cfg.m_grid = {19};
  cfg.epsilon_grid = {2.0};
  cfg.trials = 500;
  cfg.seed = derive_seed(kSeedBase, 6, 0);
  cfg.fixed_hyperparams = true;
  cfg.bound_c = 2.0;
  const auto cells = run_experiment(cfg);
  const double r0 = cell_with_beta(cells, 0.0).rejection_rate;
  const double r05 = cell_with_beta(cells, 0.5).rejection_rate;
  const double r15 = cell_with_beta(cells, 1.5).rejection_rate;
  const bool pass = r15 >= 0.8 && r0 < r05 && r05 < r15;
  return {pass, fmt("rejection rates %.3f / %.3f / %.3f at beta {0, 0.5, "
                    "1.5}, want >= 0.80 at 1.5 and strict ordering "
                    "(n=1000, m=19, eps=2, 500 trials)",
                    r0, r05, r15)};
}

// 7. The private p-value stays within the high-probability accuracy band
//    around the resampling p-value.
Outcome check_accuracy_band() {
  SynthParams params;
  params.n = 1000;
  params.beta = 0.5;
  params.bound_c = 2.0;
  const FitConfig fit = fixed_fit(10.0, false);
  const std::size_t m = 19;
  const double epsilon = 2.0;
  const double delta = 0.05;
  const double delta_t = sensitivity_crt(fit.lambda_floor);
  const double gamma = crt_gamma(delta_t, m, delta, epsilon);
  const std::size_t trials = 500;
  std::size_t held = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(derive_seed(kSeedBase, 7, t));
    const auto [ds, truth] = generate(params, rng);
    const auto cond = make_conditional_model(truth);
    const CrtResult base = crt_test(ds, *cond, m, fit, rng, true);
    const std::size_t noisy = private_rank(base.statistics, 0, delta_t,
                                           epsilon, rng);
    const double p_hat = double(1 + noisy) / double(m + 1);
    const double band =
        double(crt_gamma_count(base.statistics, gamma)) / double(m + 1);
    if (std::abs(p_hat - base.p_value) <= band + 1e-12) ++held;
  }
  const double freq = double(held) / double(trials);
  const bool pass = freq >= 0.95;
  return {pass, fmt("accuracy band held in %.3f of trials, want >= 0.950 "
                    "(beta=0.5, m=19, eps=2, delta=0.05, gamma %.2f, "
                    "500 trials)",
                    freq, gamma)};
}

// 8. More resampled copies cost power under the private release.
Outcome check_m_degradation() {
  ExperimentConfig cfg;
  cfg.test = TestKind::priv_crt;
  cfg.n_grid = {1000};
  cfg.beta_grid = {0.5};
  cfg.m_grid = {19, 99, 499};
  cfg.epsilon_grid = {2.0};
  cfg.trials = 300;
  cfg.seed = derive_seed(kSeedBase, 8, 0);
  cfg.fixed_hyperparams = true;
  cfg.bound_c = 2.0;
  const auto cells = run_experiment(cfg);
  const double r19 = cell_with_m(cells, 19).rejection_rate;
  const double r99 = cell_with_m(cells, 99).rejection_rate;
  const double r499 = cell_with_m(cells, 499).rejection_rate;
  const bool pass = r99 <= r19 && r499 <= r99;
  return {pass, fmt("rejection rates %.3f / %.3f / %.3f over m {19, 99, "
                    "499}, want nonincreasing (beta=0.5, eps=2, 300 trials)",
                    r19, r99, r499)};
}

// 9. Replace-one-row sensitivity bounds hold empirically.
Outcome check_sensitivity_audit() {
  const std::vector<std::size_t> n_list = {10, 50};
  std::size_t violations = 0;
  double worst = 0.0;
  for (double lambda : {2.0, 10.0}) {
    const SensitivityAuditResult report = sensitivity_audit(
        lambda, n_list, 1000, derive_seed(kSeedBase, 9, std::uint64_t(lambda)));
    for (const auto& row : report.rows) {
      violations += row.violations;
      worst = std::max({worst, row.max_gcm_ratio, row.max_crt_ratio,
                        row.max_pred_ratio});
    }
  }
  const bool pass = violations == 0;
  return {pass, fmt("%zu violations over 1000 neighbor pairs at each of "
                    "n {10, 50} x lambda {2, 10}; worst observed/bound "
                    "ratio %.3f",
                    violations, worst)};
}

// 10. Mechanism-level distributional checks.
Outcome check_mechanisms() {
  Rng rng = make_rng(derive_seed(kSeedBase, 10, 0));
  std::vector<double> draws(100000);
  for (double& v : draws) v = sample_laplace(rng, 1.0);
  const double ks = ks_distance(draws, [](double t) {
    return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
  });

  const double delta = 0.05;
  const double epsilon = 1.0;
  const std::size_t b = 20;
  const double slack = rnm_utility_slack(b, delta, epsilon);
  std::size_t utility_held = 0;
  const std::size_t runs = 10000;
  std::vector<double> scores(b);
  for (std::size_t r = 0; r < runs; ++r) {
    for (double& s : scores) s = -30.0 * uniform_unit(rng);
    const std::size_t pick = report_noisy_max(scores, epsilon, rng);
    const double best = *std::max_element(scores.begin(), scores.end());
    if (scores[pick] >= best - slack) ++utility_held;
  }
  const double freq = double(utility_held) / double(runs);

  const std::vector<double> equal(b, 0.0);
  std::vector<std::size_t> counts(b, 0);
  const std::size_t uruns = 20000;
  for (std::size_t r = 0; r < uruns; ++r)
    counts[report_noisy_max(equal, epsilon, rng)] += 1;
  const double chi = chi_square_uniform_statistic(counts);
  const double crit = chi_square_critical(0.01, b - 1);

  const bool pass = ks < 0.01 && freq >= 1.0 - delta && chi < crit;
  return {pass, fmt("laplace KS %.4f want < 0.0100 (1e5 draws); noisy-max "
                    "utility %.4f want >= 0.9500 (1e4 runs); equal-score "
                    "chi-square %.1f vs critical %.1f (2e4 runs)",
                    ks, freq, chi, crit)};
}

// 11. Noise scales are wired to the public penalty floor, never to the
//     cross-validated choice.
Outcome check_noise_wiring() {
  SynthParams params;
  params.n = 120;
  params.bound_c = 2.0;
  Rng data_rng = make_rng(derive_seed(kSeedBase, 11, 0));
  const auto [ds, truth] = generate(params, data_rng);

  FitConfig cv_fit;  // full grid above the floor; CV may pick any entry
  cv_fit.lambda_floor = 10.0;
  const double epsilon = 3.0;

  Rng rng = make_rng(derive_seed(kSeedBase, 11, 1));
  const GcmResult g = priv_gcm_test(ds, epsilon, cv_fit, rng);
  const bool gcm_ok = g.noise_scale == sensitivity_gcm(10.0) / epsilon &&
                      g.lambda_used == 10.0;

  const auto cond = make_conditional_model(truth);
  const CrtResult c = priv_crt_test(ds, *cond, 9, epsilon, cv_fit, rng);
  const bool crt_ok = c.delta_t == sensitivity_crt(10.0) && c.lambda_floor == 10.0;

  FitConfig high_fit = cv_fit;  // explicit penalty above the floor
  high_fit.lambda = 250.0;
  Rng rng2 = make_rng(derive_seed(kSeedBase, 11, 2));
  const GcmResult g2 = priv_gcm_test(ds, epsilon, high_fit, rng2);
  const bool pinned = g2.noise_scale == sensitivity_gcm(10.0) / epsilon;

  const bool pass = gcm_ok && crt_ok && pinned;
  return {pass, fmt("noise scale == gcm sensitivity(floor)/eps: %s; "
                    "delta_t == crt sensitivity(floor): %s; floor pinned "
                    "under explicit lambda 250: %s",
                    gcm_ok ? "yes" : "NO", crt_ok ? "yes" : "NO",
                    pinned ? "yes" : "NO")};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Check> checks = {
      {"null calibration (private residual-product)", check_null_calibration},
      {"gaussian limit of the null statistic", check_gaussian_limit},
      {"power shift under dependence", check_power_shift},
      {"power monotone in dependence strength", check_power_monotonicity},
      {"resampling null uniformity and level", check_resampling_null},
      {"private resampling power", check_resampling_power},
      {"private p-value accuracy band", check_accuracy_band},
      {"power degradation in copy count", check_m_degradation},
      {"sensitivity audit", check_sensitivity_audit},
      {"mechanism distribution checks", check_mechanisms},
      {"noise wired to the public floor", check_noise_wiring},
  };

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = checks[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] %2zu. %s: %s (%.0fs)\n", outcome.pass ? "PASS" : "FAIL",
                i + 1, checks[i].name, outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures == 0) {
    std::printf("all %zu acceptance checks passed\n", checks.size());
  } else {
    std::printf("%d of %zu acceptance checks failed\n", failures, checks.size());
  }
  return failures;
}
