#pragma once

// Derived scalar parameters for SLE_kappa, 0 < kappa < 8.

#include <cmath>
#include <stdexcept>

#include "rsle/quadrature.hpp"

namespace rsle {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/**
 * All scalars determined by kappa.
 *
 * a      = 2/kappa
 * d      = 1 + kappa/8, the trace dimension
 * p      = (4a-1) - 2(2-d), exponent of |sin z| in H(z) = |sin z|^p u(z)^zeta
 * zeta   = (4a-1) - (2-d),  exponent of u
 * q      = (4-kappa)(kappa-8)/(8 kappa)
 * beta   = a*p = -2*a*q = (4-kappa)(8-kappa)/(2 kappa^2)
 * c_star = 2 / integral_0^pi sin^{8/kappa} x dx
 *
 * beta vanishes exactly at kappa = 4 (where p = 0, zeta = 1/2) and is
 * positive iff kappa < 4.
 */
struct SleParams {
  double kappa;
  double a;
  double d;
  double p;
  double zeta;
  double q;
  double beta;
  double c_star;
};

inline SleParams derive_params(double kappa) {
  if (!(kappa > 0.0 && kappa < 8.0))
    throw std::domain_error("derive_params: kappa must lie in (0, 8)");
  SleParams P;
  P.kappa = kappa;
  P.a = 2.0 / kappa;
  P.d = 1.0 + kappa / 8.0;
  const double codim = 2.0 - P.d;
  const double four_a_m1 = 4.0 * P.a - 1.0;
  P.p = four_a_m1 - 2.0 * codim;
  P.zeta = four_a_m1 - codim;
  P.q = (4.0 - kappa) * (kappa - 8.0) / (8.0 * kappa) + 0.0;  // -0 -> +0
  P.beta = P.a * P.p;
  const double s = 8.0 / kappa;
  const double norm = integrate_adaptive(
      [s](double t) { return std::pow(std::sin(t), s); }, 0.0, kPi, 1e-12);
  P.c_star = 2.0 / norm;
  return P;
}

}  // namespace rsle
