#include "privci/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "privci/errors.hpp"

namespace privci {

double complexity_wave(double t, double s) {
  return std::exp(-s * s / 2.0) * std::sin(s * t);
}

double GroundTruth::f(std::span<const double> z) const {
  if (z.empty()) throw DimensionMismatch("ground truth f on empty input");
  return complexity_wave(z[0], s);
}

double GroundTruth::g(std::span<const double> z) const {
  if (z.empty()) throw DimensionMismatch("ground truth g on empty input");
  return -complexity_wave(z[0], s);
}

std::pair<BoundedDataset, GroundTruth> generate(const SynthParams& params,
                                                Rng& rng) {
  if (params.n < 2) throw InvalidParameter("generate requires n >= 2");
  if (params.d == 0) throw InvalidParameter("generate requires d >= 1");
  if (!(params.var_z > 0.0)) throw InvalidParameter("var_z must be > 0");
  if (!(params.s >= 0.0)) throw InvalidParameter("s must be >= 0");

  const std::size_t n = params.n;
  const double sd_z = std::sqrt(params.var_z);
  Dataset raw;
  raw.d = params.d;
  raw.z.reserve(n * params.d);
  for (std::size_t i = 0; i < n * params.d; ++i) {
    raw.z.push_back(sd_z * sample_standard_gaussian(rng));
  }
  std::vector<double> ex(n), ey(n);
  for (std::size_t i = 0; i < n; ++i) ex[i] = sample_standard_gaussian(rng);
  for (std::size_t i = 0; i < n; ++i) ey[i] = sample_standard_gaussian(rng);

  raw.x.reserve(n);
  raw.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double fz = complexity_wave(raw.z[i * params.d], params.s);
    raw.x.push_back(fz + ex[i]);
    raw.y.push_back(-fz + ey[i] + params.beta * ex[i]);
  }

  const double bound = infer_bound(n, params.bound_c);
  BoundedDataset ds = rescale(raw, bound, bound, true);

  GroundTruth truth;
  truth.s = params.s;
  truth.beta = params.beta;
  truth.cond_var_x = 1.0;
  truth.cond_var_y = 1.0 + params.beta * params.beta;
  truth.rho = params.beta;
  truth.sigma = std::sqrt(1.0 + 2.0 * params.beta * params.beta);
  truth.scale_x = bound;
  truth.scale_y = bound;
  truth.raw_residual_bound = bound;
  return {std::move(ds), truth};
}

namespace {

class SyntheticConditional final : public ConditionalModel {
 public:
  explicit SyntheticConditional(const GroundTruth& truth) : truth_(truth) {}

  double mean(std::span<const double> z) const override {
    return truth_.f(z) / truth_.scale_x;
  }

  double sample(std::span<const double> z, Rng& rng) const override {
    const double resid = std::clamp(sample_standard_gaussian(rng),
                                    -truth_.raw_residual_bound,
                                    truth_.raw_residual_bound) /
                         truth_.scale_x;
    return mean(z) + resid;
  }

  double residual_bound() const override {
    return truth_.raw_residual_bound / truth_.scale_x;
  }

 private:
  GroundTruth truth_;
};

}  // namespace

std::unique_ptr<ConditionalModel> make_conditional_model(
    const GroundTruth& truth) {
  if (!(truth.scale_x > 0.0) || !(truth.raw_residual_bound > 0.0)) {
    throw InvalidParameter("conditional model needs positive scales");
  }
  return std::make_unique<SyntheticConditional>(truth);
}

FitDiagnostics fit_diagnostics(const KrrModel& f_hat, const KrrModel& g_hat,
                               const GroundTruth& truth,
                               std::span<const double> z, std::size_t d) {
  if (d == 0 || z.size() % d != 0) {
    throw DimensionMismatch("fit_diagnostics: bad z layout");
  }
  const std::size_t n = z.size() / d;
  if (n == 0) throw EmptyInput("fit_diagnostics on empty z");

  FitDiagnostics out;
  const double var_y_rescaled =
      truth.cond_var_y / (truth.scale_y * truth.scale_y);
  const double var_x_rescaled =
      truth.cond_var_x / (truth.scale_x * truth.scale_x);
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = z.subspan(i * d, d);
    const double df = truth.f(zi) / truth.scale_x - krr_predict(f_hat, zi);
    const double dg = truth.g(zi) / truth.scale_y - krr_predict(g_hat, zi);
    out.a_f += df * df;
    out.a_g += dg * dg;
    out.b_f += df * df * var_y_rescaled;
    out.b_g += dg * dg * var_x_rescaled;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.a_f *= inv_n;
  out.a_g *= inv_n;
  out.b_f *= inv_n;
  out.b_g *= inv_n;
  return out;
}

}  // namespace privci
