#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rsle/params.hpp"
#include "rsle/quadrature.hpp"

using namespace rsle;

// Independent oracle for the normalization integral:
// int_0^pi sin^s x dx = sqrt(pi) Gamma((s+1)/2) / Gamma(s/2 + 1).
static double sine_power_integral(double s) {
  return std::exp(0.5 * std::log(kPi) + std::lgamma(0.5 * (s + 1.0)) -
                  std::lgamma(0.5 * s + 1.0));
}

TEST_CASE("derived values at kappa = 4") {
  const SleParams P = derive_params(4.0);
  CHECK(P.a == 0.5);
  CHECK(P.d == 1.5);
  CHECK(P.p == 0.0);
  CHECK(P.zeta == 0.5);
  CHECK(P.beta == 0.0);
  CHECK(P.q == 0.0);
  // int_0^pi sin^2 = pi/2 exactly, so c* = 4/pi
  CHECK_THAT(P.c_star, Catch::Matchers::WithinRel(4.0 / kPi, 1e-10));
  CHECK_THAT(P.c_star, Catch::Matchers::WithinAbs(1.27324, 1e-5));
}

TEST_CASE("derived values at kappa = 2") {
  const SleParams P = derive_params(2.0);
  CHECK(P.a == 1.0);
  CHECK(P.d == 1.25);
  CHECK_THAT(P.p, Catch::Matchers::WithinAbs(1.5, 1e-15));
  CHECK_THAT(P.zeta, Catch::Matchers::WithinAbs(2.25, 1e-15));
  CHECK_THAT(P.beta, Catch::Matchers::WithinAbs(1.5, 1e-15));
  CHECK_THAT(P.q, Catch::Matchers::WithinAbs(-0.75, 1e-15));
  // cross-check beta against its product forms
  CHECK_THAT(P.beta, Catch::Matchers::WithinAbs(-2.0 * P.a * P.q, 1e-15));
  CHECK_THAT(P.beta, Catch::Matchers::WithinAbs(
                         (4.0 - 2.0) * (8.0 - 2.0) / (2.0 * 4.0), 1e-15));
}

TEST_CASE("parameter identities on a kappa grid") {
  for (double kappa = 0.25; kappa < 8.0; kappa += 0.25) {
    const SleParams P = derive_params(kappa);
    INFO("kappa = " << kappa);
    CHECK(std::fabs(P.beta - P.a * P.p) < 1e-12);
    CHECK(std::fabs(P.beta + 2.0 * P.a * P.q) < 1e-12);
    CHECK(std::fabs(P.beta -
                    (4.0 - kappa) * (8.0 - kappa) / (2.0 * kappa * kappa)) <
          1e-12);
    CHECK(P.a > 0.25);
    CHECK(P.d > 1.0);
    CHECK(P.d < 2.0);
    CHECK((P.beta > 0.0) == (kappa < 4.0));
  }
}

TEST_CASE("c_star matches the gamma-function oracle") {
  for (double kappa : {0.5, 2.0, 8.0 / 3.0, 4.0, 16.0 / 3.0, 6.0, 7.5}) {
    const SleParams P = derive_params(kappa);
    const double oracle = 2.0 / sine_power_integral(8.0 / kappa);
    INFO("kappa = " << kappa);
    CHECK_THAT(P.c_star, Catch::Matchers::WithinRel(oracle, 1e-10));
  }
}

TEST_CASE("kappa domain is enforced") {
  CHECK_THROWS_AS(derive_params(0.0), std::domain_error);
  CHECK_THROWS_AS(derive_params(-1.0), std::domain_error);
  CHECK_THROWS_AS(derive_params(8.0), std::domain_error);
  CHECK_THROWS_AS(derive_params(12.0), std::domain_error);
}

TEST_CASE("adaptive quadrature on smooth integrands") {
  const double val = integrate_adaptive(
      [](double x) { return std::sin(x) * std::sin(x); }, 0.0, kPi);
  CHECK_THAT(val, Catch::Matchers::WithinRel(kPi / 2.0, 1e-12));
  const double expint =
      integrate_adaptive([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
  CHECK_THAT(expint, Catch::Matchers::WithinRel(std::sqrt(kPi), 1e-10));
}
