// Python bindings for the main operations: dataset generation, the four
// tests, the experiment runner, and the sensitivity constants.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "privci/crt.hpp"
#include "privci/dataset.hpp"
#include "privci/errors.hpp"
#include "privci/gcm.hpp"
#include "privci/harness.hpp"
#include "privci/kernel_regression.hpp"
#include "privci/rng.hpp"
#include "privci/synthetic.hpp"

namespace py = pybind11;
using namespace privci;

namespace {

FitConfig make_fit(double lambda_floor, bool split, bool fixed_hyperparams,
                   std::optional<double> lambda, std::optional<double> bandwidth) {
  FitConfig fit;
  fit.lambda_floor = lambda_floor;
  fit.split_mode = split;
  if (fixed_hyperparams) {
    fit.lambda = lambda_floor;
    fit.bandwidth_factors = {1.0};
  }
  if (lambda) fit.lambda = *lambda;
  if (bandwidth) fit.bandwidth = *bandwidth;
  return fit;
}

// Assemble a bounded dataset from python sequences. With a bound constant
// the responses are rescaled by sqrt(c ln n) and clipped; without one they
// must already lie in [-1, 1].
BoundedDataset make_bounded(std::vector<double> x, std::vector<double> y,
                            std::vector<double> z, std::size_t d,
                            std::optional<double> bound_c, bool clip) {
  if (d == 0) throw InvalidParameter("d must be >= 1");
  if (y.size() != x.size() || z.size() != x.size() * d)
    throw DimensionMismatch("x, y need equal length and z needs n*d values");
  Dataset raw{std::move(x), std::move(y), std::move(z), d};
  if (bound_c) {
    const double bound = infer_bound(raw.n(), *bound_c);
    return rescale(raw, bound, bound, clip);
  }
  BoundedDataset ds;
  ds.x = std::move(raw.x);
  ds.y = std::move(raw.y);
  ds.z = std::move(raw.z);
  ds.d = d;
  return ds;
}

py::dict to_dict(const GcmResult& r) {
  py::dict out;
  out["statistic"] = r.statistic;
  out["p_value"] = r.p_value;
  out["noise_scale"] = r.noise_scale;
  out["lambda_used"] = r.lambda_used;
  out["products"] = r.n;
  return out;
}

py::dict to_dict(const CrtResult& r) {
  py::dict out;
  out["p_value"] = r.p_value;
  out["rank"] = r.rank;
  out["m"] = r.m;
  out["t_observed"] = r.t_observed;
  out["delta_t"] = r.delta_t;
  out["lambda_floor"] = r.lambda_floor;
  return out;
}

py::dict to_dict(const CellResult& c) {
  py::dict out;
  out["n"] = c.cell.n;
  out["d"] = c.cell.d;
  out["s"] = c.cell.s;
  out["beta"] = c.cell.beta;
  out["epsilon"] = c.cell.epsilon;
  out["m"] = c.cell.m;
  out["trials"] = c.trials;
  out["failures"] = c.failures;
  out["rejection_rate"] = c.rejection_rate;
  out["ci_low"] = c.ci_low;
  out["ci_high"] = c.ci_high;
  out["mean_statistic"] = c.mean_statistic;
  out["var_statistic"] = c.var_statistic;
  if (!c.p_values.empty()) out["p_values"] = c.p_values;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differentially private conditional independence tests";

  m.def("sensitivity_gcm", &sensitivity_gcm, py::arg("lam"),
        "Replace-one-row L1 sensitivity of the residual products at ridge "
        "penalty lam.");
  m.def("sensitivity_crt", &sensitivity_crt, py::arg("lam"),
        "Replace-one-row sensitivity of the resampling statistic at ridge "
        "penalty lam.");
  m.def("infer_bound", &infer_bound, py::arg("n"), py::arg("c"),
        "Rescaling bound sqrt(c ln n).");

  m.def(
      "generate",
      [](std::size_t n, std::size_t d, double s, double beta, double var_z,
         double bound_c, std::uint64_t seed) {
        SynthParams params;
        params.n = n;
        params.d = d;
        params.s = s;
        params.beta = beta;
        params.var_z = var_z;
        params.bound_c = bound_c;
        Rng rng = make_rng(seed);
        const auto [ds, truth] = generate(params, rng);
        py::dict out;
        out["x"] = ds.x;
        out["y"] = ds.y;
        out["z"] = ds.z;
        out["d"] = ds.d;
        out["scale_x"] = ds.scale_x;
        out["scale_y"] = ds.scale_y;
        out["rho"] = truth.rho;
        out["sigma"] = truth.sigma;
        return out;
      },
      py::arg("n"), py::arg("d") = 1, py::arg("s") = 2.0, py::arg("beta") = 0.0,
      py::arg("var_z") = 4.0, py::arg("bound_c") = 4.0, py::arg("seed") = 1,
      "Synthetic dataset with known conditional structure, rescaled into "
      "[-1, 1]. beta = 0 makes x and y conditionally independent given z.");

  m.def(
      "gcm_test",
      [](std::vector<double> x, std::vector<double> y, std::vector<double> z,
         std::size_t d, std::optional<double> bound_c, bool clip,
         double lambda_floor, bool split, bool fixed_hyperparams,
         std::optional<double> lambda, std::optional<double> bandwidth) {
        const BoundedDataset ds = make_bounded(std::move(x), std::move(y),
                                               std::move(z), d, bound_c, clip);
        const FitConfig fit =
            make_fit(lambda_floor, split, fixed_hyperparams, lambda, bandwidth);
        return to_dict(gcm_test(ds, fit));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("d") = 1,
      py::arg("bound_c") = std::nullopt, py::arg("clip") = true,
      py::arg("lambda_floor") = 10.0, py::arg("split") = false,
      py::arg("fixed_hyperparams") = false, py::arg("lambda") = std::nullopt,
      py::arg("bandwidth") = std::nullopt,
      "Residual-product conditional independence test.");

  m.def(
      "priv_gcm_test",
      [](std::vector<double> x, std::vector<double> y, std::vector<double> z,
         double epsilon, std::size_t d, std::optional<double> bound_c,
         bool clip, double lambda_floor, bool split, bool fixed_hyperparams,
         std::optional<double> lambda, std::optional<double> bandwidth,
         std::uint64_t seed) {
        const BoundedDataset ds = make_bounded(std::move(x), std::move(y),
                                               std::move(z), d, bound_c, clip);
        const FitConfig fit =
            make_fit(lambda_floor, split, fixed_hyperparams, lambda, bandwidth);
        Rng rng = make_rng(derive_seed(seed, 0, 0));
        return to_dict(priv_gcm_test(ds, epsilon, fit, rng));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("epsilon"),
      py::arg("d") = 1, py::arg("bound_c") = std::nullopt,
      py::arg("clip") = true, py::arg("lambda_floor") = 10.0,
      py::arg("split") = false, py::arg("fixed_hyperparams") = false,
      py::arg("lambda") = std::nullopt, py::arg("bandwidth") = std::nullopt,
      py::arg("seed") = 1,
      "Private residual-product test: Laplace noise at scale "
      "sensitivity_gcm(lambda_floor)/epsilon on every product.");

  m.def(
      "synthetic_trial",
      [](const std::string& test, std::size_t n, std::size_t d, double s,
         double beta, double epsilon, std::size_t m_copies, std::uint64_t seed,
         double lambda_floor, bool split, bool fixed_hyperparams,
         double bound_c) {
        const TestKind kind = test_kind_from_string(test);
        SynthParams params;
        params.n = n;
        params.d = d;
        params.s = s;
        params.beta = beta;
        params.bound_c = bound_c;
        Rng rng = make_rng(derive_seed(seed, 0, 0));
        const auto [ds, truth] = generate(params, rng);
        const FitConfig fit = make_fit(lambda_floor, split, fixed_hyperparams,
                                       std::nullopt, std::nullopt);
        switch (kind) {
          case TestKind::gcm:
            return to_dict(gcm_test(ds, fit));
          case TestKind::priv_gcm:
            return to_dict(priv_gcm_test(ds, epsilon, fit, rng));
          case TestKind::crt: {
            const auto cond = make_conditional_model(truth);
            return to_dict(crt_test(ds, *cond, m_copies, fit, rng));
          }
          case TestKind::priv_crt: {
            const auto cond = make_conditional_model(truth);
            return to_dict(priv_crt_test(ds, *cond, m_copies, epsilon, fit, rng));
          }
        }
        throw InvalidParameter("unknown test kind");
      },
      py::arg("test"), py::arg("n"), py::arg("d") = 1, py::arg("s") = 2.0,
      py::arg("beta") = 0.0, py::arg("epsilon") = 0.0, py::arg("m") = 0,
      py::arg("seed") = 1, py::arg("lambda_floor") = 10.0,
      py::arg("split") = false, py::arg("fixed_hyperparams") = false,
      py::arg("bound_c") = 4.0,
      "One test run on a fresh synthetic dataset. The resampling tests use "
      "the generator's exact conditional law.");

  m.def(
      "run_experiment",
      [](const std::string& test, std::vector<std::size_t> n,
         std::vector<std::size_t> d, std::vector<double> s,
         std::vector<double> beta, std::vector<double> epsilon,
         std::vector<std::size_t> m_grid, std::size_t trials, double alpha,
         std::uint64_t seed, double lambda_floor, bool split,
         bool fixed_hyperparams, double bound_c, bool keep_p_values,
         bool drop_failed) {
        ExperimentConfig cfg;
        cfg.test = test_kind_from_string(test);
        cfg.n_grid = std::move(n);
        cfg.d_grid = std::move(d);
        cfg.s_grid = std::move(s);
        cfg.beta_grid = std::move(beta);
        cfg.epsilon_grid = std::move(epsilon);
        cfg.m_grid = std::move(m_grid);
        cfg.trials = trials;
        cfg.alpha = alpha;
        cfg.seed = seed;
        cfg.lambda_floor = lambda_floor;
        cfg.split_mode = split;
        cfg.fixed_hyperparams = fixed_hyperparams;
        cfg.bound_c = bound_c;
        cfg.keep_p_values = keep_p_values;
        cfg.drop_failed = drop_failed;
        validate(cfg);
        py::list out;
        for (const CellResult& cell : run_experiment(cfg)) out.append(to_dict(cell));
        return out;
      },
      py::arg("test"), py::arg("n"), py::arg("d") = std::vector<std::size_t>{1},
      py::arg("s") = std::vector<double>{2.0},
      py::arg("beta") = std::vector<double>{0.0},
      py::arg("epsilon") = std::vector<double>{},
      py::arg("m") = std::vector<std::size_t>{}, py::arg("trials") = 1,
      py::arg("alpha") = 0.05, py::arg("seed") = 1,
      py::arg("lambda_floor") = 10.0, py::arg("split") = false,
      py::arg("fixed_hyperparams") = false, py::arg("bound_c") = 4.0,
      py::arg("keep_p_values") = false, py::arg("drop_failed") = false,
      "Monte Carlo rejection rates over a parameter grid; one dict per cell.");
}
