#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "rsle/fields.hpp"
#include "rsle/params.hpp"

using namespace rsle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("chordal Green's function closed form") {
  const SleParams k4 = derive_params(4.0);
  CHECK_THAT(chordal_green(Complex{0.0, 1.0}, k4), WithinRel(1.0, 1e-14));
  CHECK_THAT(chordal_green(Complex{0.0, 1.0}, derive_params(2.0)),
             WithinRel(1.0, 1e-14));

  const SleParams k83 = derive_params(8.0 / 3.0);
  CHECK_THAT(chordal_green(Complex{1.0, 1.0}, k83), WithinRel(0.5, 1e-13));

  CHECK_THAT(chordal_green(Complex{0.0, 2.0}, k4),
             WithinRel(std::pow(2.0, -0.5), 1e-14));
  CHECK_THAT(chordal_green(Complex{0.0, 2.0}, k4), WithinAbs(0.70711, 1e-5));

  CHECK_THROWS_AS(chordal_green(Complex{1.0, 0.0}, k4), std::domain_error);
}

TEST_CASE("S invariant") {
  CHECK(s_invariant(Complex{0.0, 1.0}) == 1.0);
  CHECK_THAT(s_invariant(Complex{1.0, 1.0}),
             WithinRel(1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(s_invariant(Complex{3.0, 4.0}), WithinRel(0.8, 1e-15));
  CHECK_THROWS_AS(s_invariant(Complex{2.0, 0.0}), std::domain_error);
}

TEST_CASE("u, v, rho closed forms") {
  const UvRho w = u_v_rho({0.5 * kPi, 1.0});
  CHECK_THAT(w.v, WithinAbs(0.0, 1e-16));
  CHECK_THAT(w.u, WithinRel(std::tanh(1.0), 1e-14));
  CHECK_THAT(w.u, WithinAbs(0.76159, 1e-5));
  const double sech1 = 1.0 / std::cosh(1.0);
  CHECK_THAT(w.rho, WithinRel(sech1 * sech1, 1e-14));
  CHECK_THAT(w.rho, WithinAbs(0.41997, 1e-5));

  // x = pi/4, y -> infinity: sinh^2 y dominates
  const UvRho far = u_v_rho({0.25 * kPi, 20.0});
  CHECK_THAT(far.u, WithinAbs(1.0, 1e-8));
  CHECK_THAT(far.v, WithinAbs(0.0, 1e-8));
  CHECK_THAT(far.rho, WithinAbs(0.0, 1e-8));

  CHECK_THROWS_AS(u_v_rho({0.0, 0.0}), std::domain_error);
}

TEST_CASE("cot z = v - i u on random points") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> xr(-1.55, 1.55);
  std::uniform_real_distribution<double> yr(1e-2, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = xr(gen), y = yr(gen);
    const UvRho w = u_v_rho({x, y});
    const Complex z{x, y};
    const Complex c = std::cos(z) / std::sin(z);
    CHECK(std::abs(c - Complex{w.v, -w.u}) < 1e-12);
  }
}

TEST_CASE("rho equals -v_x at second order") {
  const double x = 0.5, y = 0.6;
  auto v_at = [&](double xx) { return u_v_rho({xx, y}).v; };
  const double rho = u_v_rho({x, y}).rho;
  auto fd_err = [&](double h) {
    return std::fabs((v_at(x + h) - v_at(x - h)) / (2.0 * h) + rho);
  };
  const double e1 = fd_err(1e-2);
  const double e2 = fd_err(5e-3);
  const double order = std::log2(e1 / e2);
  CHECK(order > 1.9);
  CHECK(order < 2.1);
}

TEST_CASE("Lambda field") {
  CHECK_THAT(lambda_field({0.5 * kPi, 1.0}), WithinRel(std::sinh(1.0), 1e-14));
  CHECK_THAT(lambda_field({0.5 * kPi, 1.0}), WithinAbs(1.17520, 1e-5));
  CHECK_THAT(lambda_field({0.0, 1.0}), WithinRel(std::cosh(1.0), 1e-14));
  CHECK_THAT(lambda_field({0.0, 1.0}), WithinAbs(1.54308, 1e-5));
}

TEST_CASE("Lambda approaches S near the base point") {
  double prev = 1.0;
  for (double t : {0.1, 0.01, 0.001}) {
    const double x = t * std::cos(0.25 * kPi);
    const double y = t * std::sin(0.25 * kPi);
    const double gap =
        std::fabs(lambda_field({x, y}) / s_invariant(Complex{x, y}) - 1.0);
    CHECK(gap < prev);
    prev = gap;
    if (t == 0.001) CHECK(gap < 1e-4);
  }
}

TEST_CASE("H field at kappa = 4 is exactly sqrt(u)") {
  const SleParams P = derive_params(4.0);
  CHECK_THAT(h_field({0.5 * kPi, 1.0}, P),
             WithinRel(std::sqrt(std::tanh(1.0)), 1e-15));
  CHECK_THAT(h_field({0.5 * kPi, 1.0}, P), WithinAbs(0.87269, 1e-5));
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> xr(-1.5, 1.5);
  std::uniform_real_distribution<double> yr(0.05, 3.0);
  for (int k = 0; k < 100; ++k) {
    const CylinderPoint z{xr(gen), yr(gen)};
    CHECK(h_field(z, P) == std::sqrt(u_v_rho(z).u));
  }
}

TEST_CASE("H field at kappa = 2 against the cotangent route") {
  const SleParams P = derive_params(2.0);
  const CylinderPoint z{0.25 * kPi, 0.5};
  // u from the complex cotangent, |sin z| from the complex sine
  const Complex zz{z.x, z.y};
  const double u_oracle = -(std::cos(zz) / std::sin(zz)).imag();
  const double sabs = std::abs(std::sin(zz));
  const double expected = std::pow(sabs, P.p) * std::pow(u_oracle, P.zeta);
  CHECK_THAT(h_field(z, P), WithinRel(expected, 1e-12));
  // stays finite far up the cylinder
  CHECK(std::isfinite(h_field({0.3, 20.0}, P)));
}

TEST_CASE("kappa = 4 disk Green's function") {
  CHECK_THAT(radial_green_disk_k4(Complex{0.5, 0.0}),
             WithinRel(std::sqrt(6.0), 1e-14));
  CHECK_THAT(radial_green_disk_k4(Complex{-0.5, 0.0}),
             WithinRel(std::sqrt(2.0 / 3.0), 1e-14));
  CHECK_THAT(radial_green_disk_k4(Complex{-0.5, 0.0}),
             WithinAbs(0.81650, 1e-5));
  // vanishes toward the boundary away from z = 1
  double prev = 1e9;
  for (double r : {0.9, 0.99, 0.999}) {
    const double g = radial_green_disk_k4(r * std::exp(Complex{0.0, 2.0}));
    CHECK(g < prev);
    prev = g;
  }
  CHECK(prev < 0.06);
  CHECK_THROWS_AS(radial_green_disk_k4(Complex{0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(radial_green_disk_k4(Complex{1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(radial_green_disk_k4(Complex{0.0, 1.5}), std::domain_error);
}

TEST_CASE("Schwarz kernel on the disk") {
  const double inv2pi = 1.0 / (2.0 * kPi);
  CHECK_THAT(schwarz_kernel_disk(Complex{0.0, 0.0}).real(),
             WithinRel(inv2pi, 1e-15));
  CHECK(std::abs(schwarz_kernel_disk(Complex{-1.0, 0.0})) < 1e-300);
  const Complex sk = schwarz_kernel_disk(Complex{0.0, 0.5});
  CHECK_THAT(sk.real(), WithinRel(3.0 / (10.0 * kPi), 1e-14));
  CHECK_THAT(sk.imag(), WithinRel(2.0 / (5.0 * kPi), 1e-14));

  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> ur(-0.7, 0.7);
  for (int k = 0; k < 100; ++k) {
    const Complex z{ur(gen), ur(gen)};
    const double poisson =
        inv2pi * (1.0 - std::norm(z)) / std::norm(1.0 - z);
    CHECK_THAT(schwarz_kernel_disk(z).real(), WithinRel(poisson, 1e-12));
  }
  CHECK_THROWS_AS(schwarz_kernel_disk(Complex{1.0, 0.0}), std::domain_error);
}

TEST_CASE("disk PDE coefficients") {
  CHECK(disk_pde_coefficients(0.3, 0.0).F == 0.0);
  const DiskCoeffs a = disk_pde_coefficients(0.5, 0.5 * kPi);
  CHECK_THAT(a.F, WithinRel(0.8, 1e-14));
  CHECK_THAT(a.J, WithinRel(0.3, 1e-14));
  const DiskCoeffs b = disk_pde_coefficients(0.5, kPi);
  CHECK_THAT(b.F, WithinAbs(0.0, 1e-15));
  CHECK_THAT(b.J, WithinRel(1.0 / 6.0, 1e-14));
  CHECK_THROWS_AS(disk_pde_coefficients(1.0, 0.1), std::domain_error);
}

TEST_CASE("analytic F_theta matches finite differences at second order") {
  const double r = 0.45, th = 1.2;
  auto F_at = [&](double t) { return disk_pde_coefficients(r, t).F; };
  const double exact = disk_coefficient_f_theta(r, th);
  auto fd_err = [&](double h) {
    return std::fabs((F_at(th + h) - F_at(th - h)) / (2.0 * h) - exact);
  };
  const double order = std::log2(fd_err(1e-2) / fd_err(5e-3));
  CHECK(order > 1.9);
  CHECK(order < 2.1);
}
