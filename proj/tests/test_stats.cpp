#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ccik/bench.hpp"
#include "ccik/stats.hpp"
#include "beta_oracle.hpp"

using namespace ccik;



TEST_CASE("jeffreys interval edge rules") {
  const auto all = jeffreys_interval(10, 10);
  CHECK(all.second == 1.0);
  CHECK(all.first > 0.0);
  const auto none = jeffreys_interval(0, 10);
  CHECK(none.first == 0.0);
  CHECK(none.second < 1.0);
  CHECK_THROWS_AS(jeffreys_interval(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(jeffreys_interval(11, 10), std::invalid_argument);
  CHECK_THROWS_AS(jeffreys_interval(1, 0), std::invalid_argument);
}

TEST_CASE("jeffreys endpoints match the quadrature oracle") {
  const auto [lo, hi] = jeffreys_interval(9, 10);
  CHECK(std::abs(lo - ccik::testing::oracle_beta_quantile(9.5, 1.5, 0.025)) < 1e-9);
  CHECK(std::abs(hi - ccik::testing::oracle_beta_quantile(9.5, 1.5, 0.975)) < 1e-9);
}

TEST_CASE("jeffreys endpoints across a trial grid") {
  double max_err = 0.0;
  for (int t = 1; t <= 50; t += (t < 12 ? 1 : 19)) {
    for (int s = 0; s <= t; ++s) {
      const auto [lo, hi] = jeffreys_interval(s, t);
      CHECK(lo >= 0.0);
      CHECK(lo <= hi);
      CHECK(hi <= 1.0);
      const double a = s + 0.5, b = t - s + 0.5;
      if (s > 0) max_err = std::max(max_err, std::abs(lo - ccik::testing::oracle_beta_quantile(a, b, 0.025)));
      if (s < t) max_err = std::max(max_err, std::abs(hi - ccik::testing::oracle_beta_quantile(a, b, 0.975)));
    }
  }
  CHECK(max_err < 1e-9);
}

TEST_CASE("regularized incomplete beta basics") {
  CHECK(ccik::regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(ccik::regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x
  CHECK(ccik::regularized_incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  const double v = ccik::regularized_incomplete_beta(3.5, 1.5, 0.6);
  CHECK(v == doctest::Approx(1.0 - ccik::regularized_incomplete_beta(1.5, 3.5, 0.4)).epsilon(1e-12));
}

TEST_CASE("truncated normal sampling hits the configured band") {
  std::mt19937_64 rng(99);
  RunningStats stats;
  for (int i = 0; i < 10000; ++i) {
    const double x = truncated_normal(rng, 0.35, 0.075, 0.15, 0.55);
    CHECK(x >= 0.15);
    CHECK(x <= 0.55);
    stats.add(x);
  }
  CHECK(std::abs(stats.mean - 0.35) < 0.01);
  CHECK(stats.sd() > 0.05);
  CHECK(stats.sd() < 0.09);
}

TEST_CASE("running stats") {
  RunningStats s;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) s.add(x);
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.sd() == doctest::Approx(std::sqrt(32.0 / 7.0)));
}
