#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "privci/dp.hpp"
#include "privci/errors.hpp"

using namespace privci;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("privacy parameter validation") {
  CHECK_NOTHROW(validate(PrivacyParams{1.0, 2.0}));
  CHECK_NOTHROW(validate(PrivacyParams{kInf, 2.0}));
  CHECK_THROWS_AS(validate(PrivacyParams{0.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(PrivacyParams{-1.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(PrivacyParams{1.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(PrivacyParams{1.0, kInf}), InvalidParameter);
}

TEST_CASE("laplace_mechanism: infinite epsilon is the identity") {
  Rng rng = make_rng(8);
  const std::vector<double> v{1.0, -2.0, 0.25};
  const std::vector<double> out = laplace_mechanism(v, {kInf, 3.0}, rng);
  CHECK(out == v);
}

TEST_CASE("laplace_mechanism adds noise with the requested scale") {
  Rng rng = make_rng(88);
  const std::vector<double> zero(100000, 0.0);
  const PrivacyParams pp{2.0, 6.0};  // scale 3
  const std::vector<double> out = laplace_mechanism(zero, pp, rng);
  double s = 0.0, s2 = 0.0;
  for (double v : out) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(out.size());
  CHECK(s / n == doctest::Approx(0.0).epsilon(0.1));
  CHECK(s2 / n == doctest::Approx(2.0 * 9.0).epsilon(0.03));  // var = 2 scale^2
}

TEST_CASE("rank_scores frozen example") {
  const std::vector<double> values{3.0, 1.0, 2.0};
  const RankScores rs = rank_scores(values, 0, 0.5);
  REQUIRE(rs.scores.size() == 3);
  // sorted descending {3, 2, 1}; target 3; scores -|q - 3| / (2 * 0.5)
  CHECK(rs.scores[0] == doctest::Approx(0.0));
  CHECK(rs.scores[1] == doctest::Approx(-1.0));
  CHECK(rs.scores[2] == doctest::Approx(-2.0));
  CHECK(rs.k == 0);
  CHECK(rs.delta_t == 0.5);
}

TEST_CASE("rank_scores second frozen example and preconditions") {
  const std::vector<double> values{1.0, 4.0, 2.0, 3.0};
  const RankScores rs = rank_scores(values, 2, 1.0);
  // sorted {4, 3, 2, 1}; target 2; scores {-1, -0.5, 0, -0.5}
  CHECK(rs.scores[0] == doctest::Approx(-1.0));
  CHECK(rs.scores[1] == doctest::Approx(-0.5));
  CHECK(rs.scores[2] == doctest::Approx(0.0));
  CHECK(rs.scores[3] == doctest::Approx(-0.5));

  CHECK_THROWS_AS((void)rank_scores(std::vector<double>{}, 0, 1.0), EmptyScores);
  CHECK_THROWS_AS((void)rank_scores(values, 4, 1.0), IndexOutOfRange);
  CHECK_THROWS_AS((void)rank_scores(values, 0, 0.0), InvalidParameter);
}

TEST_CASE("rank_scores utility peaks at the true rank") {
  const std::vector<double> values{0.3, -1.2, 2.4, 0.9, -0.1};
  for (std::size_t k = 0; k < values.size(); ++k) {
    const RankScores rs = rank_scores(values, k, 2.0);
    // Exactly one zero score (no ties here), everything else negative.
    int zeros = 0;
    for (double s : rs.scores) {
      CHECK(s <= 0.0);
      if (s == 0.0) ++zeros;
    }
    CHECK(zeros == 1);
  }
}

TEST_CASE("report_noisy_max: exact argmax at infinite epsilon, low-index ties") {
  Rng rng = make_rng(3);
  const std::vector<double> scores{0.1, 0.9, 0.3};
  CHECK(report_noisy_max(scores, kInf, rng) == 1);
  const std::vector<double> tied{0.5, 0.7, 0.7};
  CHECK(report_noisy_max(tied, kInf, rng) == 1);
  CHECK_THROWS_AS((void)report_noisy_max(std::vector<double>{}, 1.0, rng),
                  EmptyScores);
  CHECK_THROWS_AS((void)report_noisy_max(scores, 0.0, rng), InvalidParameter);
}

TEST_CASE("report_noisy_max favors higher scores under noise") {
  Rng rng = make_rng(1234);
  const std::vector<double> scores{0.0, -8.0, -8.0, -8.0};
  int hits = 0;
  const int reps = 2000;
  for (int i = 0; i < reps; ++i) {
    if (report_noisy_max(scores, 2.0, rng) == 0) ++hits;
  }
  // Gap 8 at epsilon 2: competing scores need Exp(mean 1) noise > 8.
  CHECK(static_cast<double>(hits) / reps > 0.99);
}

TEST_CASE("private_rank at infinite epsilon counts values above the target") {
  Rng rng = make_rng(7);
  const std::vector<double> values{5.0, 9.0, 7.0, 1.0};
  CHECK(private_rank(values, 0, 1.0, kInf, rng) == 2);
  CHECK(private_rank(values, 1, 1.0, kInf, rng) == 0);
  CHECK(private_rank(values, 3, 1.0, kInf, rng) == 3);
}

TEST_CASE("rnm_utility_slack formula") {
  CHECK(rnm_utility_slack(20, 0.05, 2.0) ==
        doctest::Approx(std::log(400.0)).epsilon(1e-14));
  CHECK(rnm_utility_slack(20, 0.05, kInf) == 0.0);
  CHECK_THROWS_AS((void)rnm_utility_slack(0, 0.05, 1.0), EmptyScores);
  CHECK_THROWS_AS((void)rnm_utility_slack(5, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS((void)rnm_utility_slack(5, 0.05, 0.0), InvalidParameter);
}
