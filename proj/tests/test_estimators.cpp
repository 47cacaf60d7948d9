#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "rsle/estimators.hpp"
#include "rsle/fields.hpp"
#include "rsle/params.hpp"

using namespace rsle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

LadderResult synthetic_ladder(const std::vector<double>& eps,
                              const std::vector<double>& probs,
                              std::uint64_t n = 1000000) {
  LadderResult lad;
  lad.kind = FlowKind::radial;
  lad.ups0 = 1.0;
  lad.horizon = 5.0;
  lad.n = n;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    RungResult r;
    r.eps = eps[i];
    r.hits = static_cast<std::uint64_t>(probs[i] * static_cast<double>(n));
    r.prob = bernoulli_estimate(r.hits, n);
    lad.rungs.push_back(r);
  }
  return lad;
}

}  // namespace

TEST_CASE("threshold at one is certain") {
  const SleParams P = derive_params(4.0);
  const Estimate e = estimate_hit_prob({0.25 * kPi, 0.5}, P, 1.0, 1000, 3);
  CHECK(e.mean == 1.0);
}

TEST_CASE("hit probability preconditions") {
  const SleParams P = derive_params(4.0);
  CHECK_THROWS_AS(estimate_hit_prob({0.5, 0.5}, P, 0.0, 1000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_hit_prob({0.5, 0.5}, P, 1.5, 1000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_hit_prob({0.5, 0.5}, P, 0.5, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("ladder probabilities are nested") {
  const SleParams P = derive_params(4.0);
  SimOptions opt;
  opt.dt_base = 2e-3;
  const LadderResult lad =
      estimate_hit_ladder(FlowKind::radial, Complex{0.25 * kPi, 0.5}, P,
                          LadderSpec{0.4, 3}.levels(), 4000, 17, opt);
  REQUIRE(lad.rungs.size() == 4);
  for (std::size_t k = 1; k < lad.rungs.size(); ++k) {
    CHECK(lad.rungs[k].eps < lad.rungs[k - 1].eps);
    CHECK(lad.rungs[k].hits <= lad.rungs[k - 1].hits);  // shared paths
  }
}

TEST_CASE("ladder estimates are deterministic and thread-independent") {
  const SleParams P = derive_params(8.0 / 3.0);
  SimOptions opt;
  opt.dt_base = 2e-3;
  const auto levels = LadderSpec{0.4, 3}.levels();
  const LadderResult a = estimate_hit_ladder(
      FlowKind::radial, Complex{0.5, 0.6}, P, levels, 2000, 11, opt, 0.0, 1);
  const LadderResult b = estimate_hit_ladder(
      FlowKind::radial, Complex{0.5, 0.6}, P, levels, 2000, 11, opt, 0.0, 2);
  for (std::size_t k = 0; k < a.rungs.size(); ++k) {
    CHECK(a.rungs[k].hits == b.rungs[k].hits);
    CHECK(a.rungs[k].prob.mean == b.rungs[k].prob.mean);
  }
}

TEST_CASE("green_direct normalizes by the absolute threshold") {
  const SleParams P = derive_params(4.0);
  LadderResult lad =
      synthetic_ladder({0.08, 0.04, 0.02, 0.01}, {0.30, 0.21, 0.15, 0.106});
  lad.ups0 = 0.5876;
  const GreenEstimate g = green_direct(lad, P);
  const double expected =
      std::pow(0.01 * lad.ups0, P.d - 2.0) * 0.106 / P.c_star;
  CHECK_THAT(g.value.mean, WithinRel(expected, 1e-12));
  CHECK(g.per_rung.size() == 4);
}

TEST_CASE("green_direct flags a non-monotone tail") {
  const SleParams P = derive_params(4.0);
  // P ~ c eps^{1/2} would be flat in G-hat; bend the last rung badly
  const LadderResult good =
      synthetic_ladder({0.08, 0.04, 0.02, 0.01},
                       {0.2828, 0.2000, 0.1414, 0.1000});
  CHECK_FALSE(green_direct(good, P).trend_flag);
  const LadderResult bent = synthetic_ladder({0.08, 0.04, 0.02, 0.01},
                                             {0.2828, 0.2000, 0.1414, 0.125});
  const GreenEstimate g = green_direct(bent, P);
  CHECK(g.trend_flag);
  CHECK(g.value.ci_hi - g.value.mean >
        1.97 * g.value.std_err);  // widened interval
}

TEST_CASE("green_direct requires three octaves") {
  const SleParams P = derive_params(4.0);
  const LadderResult shallow =
      synthetic_ladder({0.08, 0.04}, {0.3, 0.2});
  CHECK_THROWS_AS(green_direct(shallow, P), std::invalid_argument);
}

TEST_CASE("green_via_phi at kappa = 4 is exactly H") {
  const SleParams P = derive_params(4.0);
  const CylinderPoint z{0.25 * kPi, 0.5};
  const Estimate g = green_via_phi(z, P, 1000, 5);
  CHECK(g.mean == h_field(z, P));
  CHECK(g.std_err == 0.0);
  CHECK_THROWS_AS(green_via_phi(z, derive_params(6.0), 1000, 5),
                  std::invalid_argument);
}

TEST_CASE("green_via_phi approaches the chordal formula near the base") {
  const SleParams P = derive_params(2.0);
  const double r = 0.05;
  const CylinderPoint z{r * std::cos(0.25 * kPi), r * std::sin(0.25 * kPi)};
  const Estimate g = green_via_phi(z, P, 2000, 9);
  const double chordal = chordal_green(z.as_complex(), P);
  CHECK(std::fabs(g.mean / chordal - 1.0) < 0.02);
}

TEST_CASE("martingale means start at the exact initial value") {
  const SleParams P = derive_params(4.0);
  const Complex z{0.25 * kPi, 0.8};
  SimOptions opt;
  opt.dt_base = 2e-3;
  const MartingaleCheck mc = martingale_diagnostic(
      MartingaleKind::radial_n, z, P, {0.0, 0.05, 0.1}, 500, 3, opt);
  const CylinderPoint w{z.real(), z.imag()};
  const double n0 = std::pow(conformal_radius(w), P.d - 2.0) *
                    std::pow(lambda_field(w), 4.0 * P.a - 1.0);
  CHECK_THAT(mc.n0, WithinRel(n0, 1e-12));
  CHECK(mc.means[0].mean == mc.n0);
  CHECK(mc.means[0].std_err == 0.0);
}

TEST_CASE("stopped martingale means stay near N0") {
  const SleParams P = derive_params(4.0);
  SimOptions opt;
  const MartingaleCheck mc = martingale_diagnostic(
      MartingaleKind::radial_n, Complex{0.25 * kPi, 0.8}, P,
      {0.0, 0.05, 0.1, 0.2}, 4000, 21, opt);
  for (std::size_t k = 1; k < mc.means.size(); ++k) {
    INFO("t = " << mc.t_grid[k]);
    CHECK(std::fabs(mc.means[k].mean - mc.n0) <
          4.0 * mc.means[k].std_err + 1e-3 * mc.n0);
  }
}

TEST_CASE("chordal martingale means stay near M0") {
  const SleParams P = derive_params(8.0 / 3.0);
  SimOptions opt;
  const MartingaleCheck mc = martingale_diagnostic(
      MartingaleKind::chordal_m, Complex{0.0, 1.0}, P, {0.0, 0.05, 0.1, 0.2},
      4000, 23, opt);
  CHECK_THAT(mc.n0, WithinRel(1.0, 1e-12));  // ups0 = 1, S0 = 1 at z = i
  for (std::size_t k = 1; k < mc.means.size(); ++k) {
    INFO("t = " << mc.t_grid[k]);
    CHECK(std::fabs(mc.means[k].mean - mc.n0) <
          4.0 * mc.means[k].std_err + 1e-3 * mc.n0);
  }
}

TEST_CASE("exponent fit recovers a synthetic power law") {
  const std::vector<double> eps{0.08, 0.04, 0.02, 0.01, 0.005};
  std::vector<double> probs;
  for (double e : eps) probs.push_back(std::pow(e, 0.75));
  const LadderResult lad = synthetic_ladder(eps, probs);
  const LineFit fit = exponent_fit(lad);
  CHECK_THAT(fit.slope, WithinAbs(0.75, 2e-3));
}

TEST_CASE("exponent fit drops empty rungs and requires four") {
  LadderResult lad = synthetic_ladder({0.08, 0.04, 0.02, 0.01},
                                      {0.3, 0.2, 0.15, 0.1});
  lad.rungs[3].hits = 0;  // now only 3 usable rungs
  CHECK_THROWS_AS(exponent_fit(lad), std::invalid_argument);
}
