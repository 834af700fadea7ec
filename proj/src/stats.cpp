#include "privci/stats.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include <boost/math/distributions/chi_squared.hpp>

#include "privci/errors.hpp"

namespace privci {

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

namespace {

double horner(double t, std::initializer_list<double> coeffs_high_to_low) {
  double acc = 0.0;
  for (double c : coeffs_high_to_low) acc = acc * t + c;
  return acc;
}

// Wichura's PPND16 rational approximations, one per region.
double quantile_central(double q) {
  const double r = 0.180625 - q * q;
  const double num = horner(r, {2.5090809287301226727e+3,
                                3.3430575583588128105e+4,
                                6.7265770927008700853e+4,
                                4.5921953931549871457e+4,
                                1.3731693765509461125e+4,
                                1.9715909503065514427e+3,
                                1.3314166789178437745e+2,
                                3.3871328727963666080e+0});
  const double den = horner(r, {5.2264952788528545610e+3,
                                2.8729085735721942674e+4,
                                3.9307895800092710610e+4,
                                2.1213794301586595867e+4,
                                5.3941960214247511077e+3,
                                6.8718700749205790830e+2,
                                4.2313330701600911252e+1,
                                1.0});
  return q * num / den;
}

double quantile_tail(double r) {
  if (r <= 5.0) {
    const double t = r - 1.6;
    const double num = horner(t, {7.74545014278341407640e-4,
                                  2.27238449892691845833e-2,
                                  2.41780725177450611770e-1,
                                  1.27045825245236838258e+0,
                                  3.64784832476320460504e+0,
                                  5.76949722146069140550e+0,
                                  4.63033784615654529590e+0,
                                  1.42343711074968357734e+0});
    const double den = horner(t, {1.05075007164441684324e-9,
                                  5.47593808499534494600e-4,
                                  1.51986665636164571966e-2,
                                  1.48103976427480074590e-1,
                                  6.89767334985100004550e-1,
                                  1.67638483018380384940e+0,
                                  2.05319162663775882187e+0,
                                  1.0});
    return num / den;
  }
  const double t = r - 5.0;
  const double num = horner(t, {2.01033439929228813265e-7,
                                2.71155556874348757815e-5,
                                1.24266094738807843860e-3,
                                2.65321895265761230930e-2,
                                2.96560571828504891230e-1,
                                1.78482653991729133580e+0,
                                5.46378491116411436990e+0,
                                6.65790464350110377720e+0});
  const double den = horner(t, {2.04426310338993978564e-15,
                                1.42151175831644588870e-7,
                                1.84631831751005468180e-5,
                                7.86869131145613259100e-4,
                                1.48753612908506148525e-2,
                                1.36929880922735805310e-1,
                                5.99832206555887937690e-1,
                                1.0});
  return num / den;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidParameter("normal_quantile requires p in the open interval (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) return quantile_central(q);
  const double tail_p = q < 0.0 ? p : 1.0 - p;
  const double x = quantile_tail(std::sqrt(-std::log(tail_p)));
  return q < 0.0 ? -x : x;
}

double sample_mean(std::span<const double> v) {
  if (v.empty()) throw EmptyInput("sample_mean on empty input");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw EmptyInput("sample_variance needs at least two values");
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

RateCi wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw EmptyInput("wilson_interval with zero trials");
  if (successes > trials) throw InvalidParameter("successes exceed trials");
  const double z = normal_quantile(0.975);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {phat, std::max(0.0, center - half), std::min(1.0, center + half)};
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptyInput("ks_distance on empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_critical(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("ks alpha in (0,1)");
  if (n == 0) throw EmptyInput("ks_critical with n = 0");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double chi_square_critical(double alpha, std::size_t dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameter("chi-square alpha in (0,1)");
  }
  if (dof == 0) throw InvalidParameter("chi-square dof must be positive");
  const boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 1.0 - alpha);
}

double chi_square_uniform_statistic(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw EmptyInput("chi-square needs at least two bins");
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  if (total == 0) throw EmptyInput("chi-square with no observations");
  const double expected =
      static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace privci
