#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "privci/rng.hpp"

namespace privci {

struct PrivacyParams {
  double epsilon = 1.0;      // > 0; +infinity disables the noise exactly
  double sensitivity = 1.0;  // > 0
};

void validate(const PrivacyParams& pp);

// Adds independent Laplace(0, sensitivity/epsilon) noise to each value.
// epsilon = +infinity yields noise that is exactly zero.
[[nodiscard]] std::vector<double> laplace_mechanism(std::span<const double> values,
                                                    const PrivacyParams& pp,
                                                    Rng& rng);

struct RankScores {
  std::vector<double> scores;  // one per candidate rank c = 0..B-1
  std::size_t k = 0;
  double delta_t = 1.0;
};

// Utility of reporting rank c for values[k]: minus the distance from
// values[k] to the c-th largest value, scaled by 2 * delta_t so that a
// one-row change moves every score by at most 1.
[[nodiscard]] RankScores rank_scores(std::span<const double> values, std::size_t k,
                                     double delta_t);

// Report Noisy Max with Exponential(mean 2/epsilon) noise; ties after noise
// resolve to the lowest index. epsilon = +infinity returns the exact argmax.
[[nodiscard]] std::size_t report_noisy_max(std::span<const double> scores,
                                           double epsilon, Rng& rng);

// Composition: rank_scores + report_noisy_max, the private rank estimate.
[[nodiscard]] std::size_t private_rank(std::span<const double> values,
                                       std::size_t k, double delta_t,
                                       double epsilon, Rng& rng);

// High-probability utility slack of report_noisy_max over B candidates:
// the reported score trails the best by at most 2 ln(B/delta)/epsilon with
// probability >= 1 - delta.
[[nodiscard]] double rnm_utility_slack(std::size_t b, double delta, double epsilon);

}  // namespace privci
