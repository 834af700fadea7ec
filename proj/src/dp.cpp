#include "privci/dp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "privci/errors.hpp"

namespace privci {

void validate(const PrivacyParams& pp) {
  if (!(pp.epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (!(pp.sensitivity > 0.0) || !std::isfinite(pp.sensitivity)) {
    throw InvalidParameter("sensitivity must be finite and > 0");
  }
}

std::vector<double> laplace_mechanism(std::span<const double> values,
                                      const PrivacyParams& pp, Rng& rng) {
  validate(pp);
  const double scale = std::isinf(pp.epsilon) ? 0.0 : pp.sensitivity / pp.epsilon;
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v + sample_laplace(rng, scale));
  return out;
}

RankScores rank_scores(std::span<const double> values, std::size_t k,
                       double delta_t) {
  if (values.empty()) throw EmptyScores("rank_scores on empty values");
  if (k >= values.size()) throw IndexOutOfRange("rank index past end of values");
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
    throw InvalidParameter("delta_t must be finite and > 0");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
  RankScores rs;
  rs.k = k;
  rs.delta_t = delta_t;
  rs.scores.reserve(sorted.size());
  const double target = values[k];
  for (double q : sorted) {
    rs.scores.push_back(-std::abs(q - target) / (2.0 * delta_t));
  }
  return rs;
}

std::size_t report_noisy_max(std::span<const double> scores, double epsilon,
                             Rng& rng) {
  if (scores.empty()) throw EmptyScores("report_noisy_max on empty scores");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  const double mean = std::isinf(epsilon) ? 0.0 : 2.0 / epsilon;
  std::size_t arg = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double noisy = scores[i] + sample_exponential(rng, mean);
    if (noisy > best) {  // strict: ties keep the lowest index
      best = noisy;
      arg = i;
    }
  }
  return arg;
}

std::size_t private_rank(std::span<const double> values, std::size_t k,
                         double delta_t, double epsilon, Rng& rng) {
  const RankScores rs = rank_scores(values, k, delta_t);
  return report_noisy_max(rs.scores, epsilon, rng);
}

double rnm_utility_slack(std::size_t b, double delta, double epsilon) {
  if (b == 0) throw EmptyScores("slack over zero candidates");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta in (0,1)");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (std::isinf(epsilon)) return 0.0;
  return 2.0 * std::log(static_cast<double>(b) / delta) / epsilon;
}

}  // namespace privci
