// Command line front end. Four single-dataset subcommands read a CSV and run
// one test; `experiment` and `sensitivity-audit` run on synthetic data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "privci/crt.hpp"
#include "privci/dataset.hpp"
#include "privci/errors.hpp"
#include "privci/gcm.hpp"
#include "privci/harness.hpp"
#include "privci/kernel_regression.hpp"
#include "privci/rng.hpp"
#include "privci/stats.hpp"

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw privci::InvalidConfig("cannot open output file: " + output);
  out << text;
}

// Options shared by the single-dataset subcommands.
struct SingleOptions {
  std::string input;
  std::size_t d = 1;
  double bound_c = 4.0;
  bool clip = true;
  double lambda_floor = 10.0;
  bool split = false;
  bool fixed_hyperparams = false;
  double epsilon = 0.0;
  std::size_t m = 0;
  std::uint64_t seed = 1;
  std::string output;
};

privci::FitConfig make_fit_config(const SingleOptions& opt) {
  privci::FitConfig fit;
  fit.lambda_floor = opt.lambda_floor;
  fit.split_mode = opt.split;
  if (opt.fixed_hyperparams) {
    fit.lambda = opt.lambda_floor;
    fit.bandwidth_factors = {1.0};
  }
  return fit;
}

privci::BoundedDataset load_bounded(const SingleOptions& opt) {
  const privci::Dataset raw = privci::load_csv(opt.input, opt.d);
  const double bound = privci::infer_bound(raw.n(), opt.bound_c);
  return privci::rescale(raw, bound, bound, opt.clip);
}

json dataset_echo(const privci::BoundedDataset& ds) {
  return json{{"rows", ds.n()},
              {"d", ds.d},
              {"scale_x", ds.scale_x},
              {"scale_y", ds.scale_y},
              {"clipped_x", ds.clipped_x},
              {"clipped_y", ds.clipped_y}};
}

// Conditional law of x given z estimated from the dataset itself: kernel
// ridge mean, Gaussian residual with the in-sample residual deviation,
// clipped so draws respect the declared bound.
class EstimatedConditional final : public privci::ConditionalModel {
 public:
  EstimatedConditional(privci::KrrModel model, double sd, double bound)
      : model_(std::move(model)), sd_(sd), bound_(bound) {}

  [[nodiscard]] double mean(std::span<const double> z) const override {
    return privci::krr_predict(model_, z);
  }

  [[nodiscard]] double sample(std::span<const double> z,
                              privci::Rng& rng) const override {
    const double noise = privci::sample_gaussian(rng, 0.0, sd_);
    return mean(z) + std::clamp(noise, -bound_, bound_);
  }

  [[nodiscard]] double residual_bound() const override { return bound_; }

  [[nodiscard]] double sd() const { return sd_; }

 private:
  privci::KrrModel model_;
  double sd_ = 1.0;
  double bound_ = 1.0;
};

EstimatedConditional estimate_conditional(const privci::BoundedDataset& ds,
                                          const privci::FitConfig& fit,
                                          double bound_c, bool enforce_floor) {
  privci::FittedRegression reg =
      privci::fit_regression(ds.z, ds.d, ds.x, fit, /*stream=*/0, enforce_floor);
  const std::vector<double> res = privci::residuals(reg.model, ds.z, ds.x);
  const double sd = std::sqrt(privci::sample_variance(res));
  if (!(sd > 0.0))
    throw privci::DegenerateVariance(
        "conditional residuals of x given z are degenerate");
  const double bound = privci::infer_bound(ds.n(), bound_c) * sd;
  return EstimatedConditional(std::move(reg.model), sd, bound);
}

int run_single_gcm(const SingleOptions& opt, bool is_private) {
  const privci::BoundedDataset ds = load_bounded(opt);
  const privci::FitConfig fit = make_fit_config(opt);
  privci::GcmResult res;
  if (is_private) {
    privci::Rng rng = privci::make_rng(privci::derive_seed(opt.seed, 0, 0));
    res = privci::priv_gcm_test(ds, opt.epsilon, fit, rng);
  } else {
    res = privci::gcm_test(ds, fit);
  }
  json out{{"schema_version", privci::kSchemaVersion},
           {"test", is_private ? "priv-gcm" : "gcm"},
           {"dataset", dataset_echo(ds)},
           {"statistic", res.statistic},
           {"p_value", res.p_value},
           {"noise_scale", res.noise_scale},
           {"lambda_used", res.lambda_used},
           {"products", res.n}};
  if (is_private) out["epsilon"] = opt.epsilon;
  emit(out.dump(2) + "\n", opt.output);
  return 0;
}

int run_single_crt(const SingleOptions& opt, bool is_private) {
  const privci::BoundedDataset ds = load_bounded(opt);
  const privci::FitConfig fit = make_fit_config(opt);
  const EstimatedConditional cond =
      estimate_conditional(ds, fit, opt.bound_c, is_private);
  privci::Rng rng = privci::make_rng(privci::derive_seed(opt.seed, 0, 0));
  privci::CrtResult res;
  if (is_private) {
    res = privci::priv_crt_test(ds, cond, opt.m, opt.epsilon, fit, rng);
  } else {
    res = privci::crt_test(ds, cond, opt.m, fit, rng);
  }
  json out{{"schema_version", privci::kSchemaVersion},
           {"test", is_private ? "priv-crt" : "crt"},
           {"dataset", dataset_echo(ds)},
           {"p_value", res.p_value},
           {"rank", res.rank},
           {"m", res.m},
           {"t_observed", res.t_observed},
           {"delta_t", res.delta_t},
           {"lambda_floor", res.lambda_floor},
           {"conditional_sd", cond.sd()},
           {"conditional_bound", cond.residual_bound()}};
  if (is_private) out["epsilon"] = opt.epsilon;
  emit(out.dump(2) + "\n", opt.output);
  return 0;
}

// Options for the synthetic experiment runner.
struct ExperimentOptions {
  std::string test;
  privci::ExperimentConfig cfg;
  std::string output;
  std::string format = "json";
};

int run_experiment_cmd(ExperimentOptions& opt) {
  opt.cfg.test = privci::test_kind_from_string(opt.test);
  privci::validate(opt.cfg);
  const std::vector<privci::CellResult> results = privci::run_experiment(opt.cfg);
  const std::string text = opt.format == "csv"
                               ? privci::serialize_csv(opt.cfg, results)
                               : privci::serialize_json(opt.cfg, results);
  emit(text, opt.output);
  return 0;
}

struct AuditOptions {
  double lambda = 10.0;
  std::vector<std::size_t> n_list = {10, 50};
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string output;
  std::string format = "json";
};

std::string audit_csv(const privci::SensitivityAuditResult& report) {
  std::string text =
      "schema_version,lambda,trials,n,max_gcm_ratio,max_crt_ratio,"
      "max_pred_ratio,violations\n";
  for (const auto& row : report.rows) {
    text += std::to_string(privci::kSchemaVersion) + ",";
    text += format_double(report.lambda) + ",";
    text += std::to_string(report.trials) + ",";
    text += std::to_string(row.n) + ",";
    text += format_double(row.max_gcm_ratio) + ",";
    text += format_double(row.max_crt_ratio) + ",";
    text += format_double(row.max_pred_ratio) + ",";
    text += std::to_string(row.violations) + "\n";
  }
  return text;
}

std::string audit_json(const privci::SensitivityAuditResult& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back(json{{"n", row.n},
                        {"max_gcm_ratio", row.max_gcm_ratio},
                        {"max_crt_ratio", row.max_crt_ratio},
                        {"max_pred_ratio", row.max_pred_ratio},
                        {"violations", row.violations}});
  }
  json out{{"schema_version", privci::kSchemaVersion},
           {"lambda", report.lambda},
           {"trials", report.trials},
           {"gcm_bound", privci::sensitivity_gcm(report.lambda)},
           {"crt_bound", privci::sensitivity_crt(report.lambda)},
           {"rows", rows}};
  return out.dump(2) + "\n";
}

int run_audit_cmd(const AuditOptions& opt) {
  const privci::SensitivityAuditResult report =
      privci::sensitivity_audit(opt.lambda, opt.n_list, opt.trials, opt.seed);
  emit(opt.format == "csv" ? audit_csv(report) : audit_json(report), opt.output);
  return 0;
}

void add_single_flags(CLI::App* sub, SingleOptions& opt, bool is_private,
                      bool is_resampling) {
  sub->add_option("--input", opt.input, "CSV file with columns x, y, z1..zd")
      ->required();
  sub->add_option("--d", opt.d, "conditioning dimension")->capture_default_str();
  sub->add_option("--bound-c", opt.bound_c,
                  "rescale x and y by sqrt(bound-c * ln n)")
      ->capture_default_str();
  sub->add_flag("--clip,!--no-clip", opt.clip,
                "clamp rescaled values into [-1, 1] instead of failing");
  sub->add_option("--lambda-floor", opt.lambda_floor, "public ridge penalty floor")
      ->capture_default_str();
  sub->add_flag("--split", opt.split, "fit on the first half, test on the second");
  sub->add_flag("--fixed-hyperparams", opt.fixed_hyperparams,
                "skip cross-validation: lambda = floor, median bandwidth");
  sub->add_option("--output", opt.output, "write the result here instead of stdout");
  if (is_private) {
    sub->add_option("--epsilon", opt.epsilon, "privacy budget")->required();
  }
  if (is_resampling) {
    sub->add_option("--m", opt.m, "number of resampled copies")->required();
    sub->add_option("--seed", opt.seed, "resampling seed")->capture_default_str();
  } else if (is_private) {
    sub->add_option("--seed", opt.seed, "noise seed")->capture_default_str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private conditional independence tests"};
  app.require_subcommand(1);

  SingleOptions single;
  ExperimentOptions exp;
  AuditOptions audit;

  CLI::App* gcm = app.add_subcommand("gcm", "residual-product test on a CSV dataset");
  add_single_flags(gcm, single, false, false);
  CLI::App* priv_gcm = app.add_subcommand(
      "priv-gcm", "private residual-product test on a CSV dataset");
  add_single_flags(priv_gcm, single, true, false);
  CLI::App* crt = app.add_subcommand("crt", "resampling test on a CSV dataset");
  add_single_flags(crt, single, false, true);
  CLI::App* priv_crt = app.add_subcommand(
      "priv-crt", "private resampling test on a CSV dataset");
  add_single_flags(priv_crt, single, true, true);

  CLI::App* experiment =
      app.add_subcommand("experiment", "Monte Carlo rejection rates on synthetic data");
  experiment->add_option("--test", exp.test, "gcm, priv-gcm, crt, or priv-crt")
      ->required();
  experiment->add_option("--n", exp.cfg.n_grid, "sample sizes")->required();
  experiment->add_option("--d", exp.cfg.d_grid, "conditioning dimensions");
  experiment->add_option("--s", exp.cfg.s_grid, "conditional-mean complexities");
  experiment->add_option("--beta", exp.cfg.beta_grid, "dependence strengths");
  experiment->add_option("--epsilon", exp.cfg.epsilon_grid,
                         "privacy budgets (private tests only)");
  experiment->add_option("--m", exp.cfg.m_grid,
                         "resampled copies (resampling tests only)");
  experiment->add_option("--trials", exp.cfg.trials, "trials per grid cell")
      ->capture_default_str();
  experiment->add_option("--alpha", exp.cfg.alpha, "rejection level")
      ->capture_default_str();
  experiment->add_option("--seed", exp.cfg.seed, "master seed")
      ->capture_default_str();
  experiment->add_option("--lambda-floor", exp.cfg.lambda_floor,
                         "public ridge penalty floor")
      ->capture_default_str();
  experiment->add_flag("--split", exp.cfg.split_mode,
                       "fit on the first half, test on the second");
  experiment->add_flag("--fixed-hyperparams", exp.cfg.fixed_hyperparams,
                       "skip cross-validation: lambda = floor, median bandwidth");
  experiment->add_option("--bound-c", exp.cfg.bound_c,
                         "rescaling constant for the generator")
      ->capture_default_str();
  experiment->add_flag("--keep-p-values", exp.cfg.keep_p_values,
                       "retain per-trial p-values in the output");
  experiment->add_flag("--drop-failed", exp.cfg.drop_failed,
                       "exclude failed trials from rate denominators");
  experiment->add_option("--output", exp.output,
                         "write results here instead of stdout");
  experiment->add_option("--format", exp.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  CLI::App* audit_cmd = app.add_subcommand(
      "sensitivity-audit", "empirical replace-one-row sensitivity check");
  audit_cmd->add_option("--lambda-floor", audit.lambda, "ridge penalty to audit")
      ->capture_default_str();
  audit_cmd->add_option("--n", audit.n_list, "dataset sizes")->capture_default_str();
  audit_cmd->add_option("--trials", audit.trials, "neighbor pairs per size")
      ->capture_default_str();
  audit_cmd->add_option("--seed", audit.seed, "audit seed")->capture_default_str();
  audit_cmd->add_option("--output", audit.output,
                        "write the report here instead of stdout");
  audit_cmd->add_option("--format", audit.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gcm->parsed()) return run_single_gcm(single, false);
    if (priv_gcm->parsed()) return run_single_gcm(single, true);
    if (crt->parsed()) return run_single_crt(single, false);
    if (priv_crt->parsed()) return run_single_crt(single, true);
    if (experiment->parsed()) return run_experiment_cmd(exp);
    if (audit_cmd->parsed()) return run_audit_cmd(audit);
  } catch (const privci::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
