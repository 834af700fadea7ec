#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "privci/rng.hpp"
#include "privci/stats.hpp"

namespace privci {

inline constexpr int kSchemaVersion = 1;

enum class TestKind { gcm, priv_gcm, crt, priv_crt };

[[nodiscard]] std::string to_string(TestKind kind);
[[nodiscard]] TestKind test_kind_from_string(const std::string& name);
[[nodiscard]] bool is_private(TestKind kind);
[[nodiscard]] bool is_resampling(TestKind kind);

struct ExperimentConfig {
  TestKind test = TestKind::gcm;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> d_grid = {1};
  std::vector<double> s_grid = {2.0};
  std::vector<double> beta_grid = {0.0};
  std::vector<double> epsilon_grid;   // required iff the test is private
  std::vector<std::size_t> m_grid;    // required iff the test resamples
  std::size_t trials = 1;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  double lambda_floor = 10.0;
  bool split_mode = false;
  bool fixed_hyperparams = false;  // lambda = floor, bandwidth = median distance
  double bound_c = 4.0;
  bool keep_p_values = false;  // retain per-trial p-values in each cell
  bool drop_failed = false;    // default counts failed trials as non-rejections
};

void validate(const ExperimentConfig& cfg);

// One grid point. epsilon is NaN and m is 0 when the test does not use them.
struct Cell {
  std::size_t n = 0;
  std::size_t d = 1;
  double s = 2.0;
  double beta = 0.0;
  double epsilon = 0.0;
  std::size_t m = 0;
};

struct CellResult {
  Cell cell;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double rejection_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_statistic = 0.0;  // over succeeded trials
  double var_statistic = 0.0;   // unbiased, 0 when fewer than 2 succeeded
  std::vector<double> p_values;  // succeeded trials, in trial order, if kept
};

// Deterministic seed for one trial: depends on the master seed, the cell's
// parameter values (not its grid position), and the trial index. Reordering
// or extending the grids leaves unrelated cells' draws unchanged.
[[nodiscard]] std::uint64_t trial_seed(const ExperimentConfig& cfg,
                                       const Cell& cell, std::size_t trial);

// Runs every grid cell for `trials` trials. Trials that raise a library
// error are tagged as failures; by default they count as non-rejections.
[[nodiscard]] std::vector<CellResult> run_experiment(const ExperimentConfig& cfg);

// Fraction of p-values <= alpha with a Wilson 95% interval.
[[nodiscard]] RateCi rejection_rate(std::span<const double> p_values,
                                    double alpha);

struct UniformityResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
  std::vector<std::size_t> counts;  // one bin per lattice point
};

// Checks resampling p-values against the discrete uniform law on
// {1/(m+1), ..., 1} by a chi-square test at level 0.01. Values off the
// lattice raise OffLatticeValue.
[[nodiscard]] UniformityResult uniformity_check(std::span<const double> p_values,
                                                std::size_t m);

struct SensitivityAuditRow {
  std::size_t n = 0;
  double max_gcm_ratio = 0.0;   // worst ||R - R'||_1 over sensitivity_gcm
  double max_crt_ratio = 0.0;   // worst |T - T'| over sensitivity_crt
  double max_pred_ratio = 0.0;  // worst prediction shift over its bound
  std::size_t violations = 0;   // ratios above 1 across all checks
};

struct SensitivityAuditResult {
  double lambda = 0.0;
  std::size_t trials = 0;
  std::vector<SensitivityAuditRow> rows;
};

// Empirical check of the replace-one-row sensitivity bounds: random bounded
// datasets, one row replaced, statistics recomputed on both. All ratios must
// stay at or below 1.
[[nodiscard]] SensitivityAuditResult sensitivity_audit(
    double lambda, std::span<const std::size_t> n_list, std::size_t trials,
    std::uint64_t seed);

enum class OutputFormat { csv, json };

// Stable plain-text serializations: fixed column order, fixed float
// formatting, no locale dependence. Identical inputs give identical bytes.
[[nodiscard]] std::string serialize_csv(const ExperimentConfig& cfg,
                                        std::span<const CellResult> results);
[[nodiscard]] std::string serialize_json(const ExperimentConfig& cfg,
                                         std::span<const CellResult> results);
void write_results(const std::string& path, const ExperimentConfig& cfg,
                   std::span<const CellResult> results, OutputFormat format);

}  // namespace privci
