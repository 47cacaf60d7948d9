#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "rsle/stats.hpp"

using namespace rsle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("running statistics match direct formulas") {
  const std::vector<double> xs{1.0, 2.0, 4.0, 8.0, 16.0};
  RunningStat s;
  for (double x : xs) s.add(x);
  CHECK_THAT(s.mean, WithinRel(6.2, 1e-14));
  CHECK_THAT(s.variance(), WithinRel(37.2, 1e-12));

  RunningStat a, b;
  for (std::size_t i = 0; i < xs.size(); ++i)
    (i < 2 ? a : b).add(xs[i]);
  a.merge(b);
  CHECK(a.n == s.n);
  CHECK_THAT(a.mean, WithinRel(s.mean, 1e-13));
  CHECK_THAT(a.variance(), WithinRel(s.variance(), 1e-13));
}

TEST_CASE("estimate carries the 95% interval") {
  RunningStat s;
  for (int i = 0; i < 1000; ++i) s.add(i % 2 ? 1.0 : -1.0);
  const Estimate e = make_estimate(s);
  CHECK_THAT(e.mean, WithinAbs(0.0, 1e-12));
  CHECK_THAT(e.ci_hi - e.mean, WithinRel(1.96 * e.std_err, 1e-12));
}

TEST_CASE("Wilson interval for rare counts") {
  auto [lo0, hi0] = wilson_interval(0, 1000);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  CHECK(hi0 < 0.01);

  const Estimate rare = bernoulli_estimate(5, 1000);
  CHECK(rare.ci_lo > 0.0);            // Wilson keeps rare counts positive
  CHECK(rare.ci_lo < rare.mean);
  CHECK(rare.ci_hi > rare.mean);

  const Estimate common = bernoulli_estimate(500, 1000);
  CHECK_THAT(common.ci_hi - common.mean, WithinRel(1.96 * common.std_err, 1e-12));

  CHECK_THROWS_AS(bernoulli_estimate(1, 0), std::invalid_argument);
}

TEST_CASE("KS distance behaves like a distance") {
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
  auto uniform_cdf = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  CHECK(ks_distance(grid, uniform_cdf) < 2e-3);

  std::vector<double> shifted;
  for (double g : grid) shifted.push_back(std::min(1.0, g + 0.1));
  CHECK(ks_distance(shifted, uniform_cdf) > 0.09);
}

TEST_CASE("weighted least squares recovers an exact line") {
  std::vector<double> x, y, s;
  for (int i = 0; i < 6; ++i) {
    x.push_back(0.5 * i);
    y.push_back(0.75 * x.back() - 2.0);
    s.push_back(1e-6);
  }
  const LineFit fit = weighted_least_squares(x, y, s);
  CHECK_THAT(fit.slope, WithinAbs(0.75, 1e-9));
  CHECK_THAT(fit.intercept, WithinAbs(-2.0, 1e-9));
  CHECK(fit.slope_std_err < 1e-5);
}
