#pragma once

// Closed-form scalar fields on H, D, and the cylinder H*.
//
// Everything on the cylinder is evaluated from the (x, y) parametrization
// directly; |sin z|^2 is always computed as sin^2 x + sinh^2 y, which stays
// accurate for small y where the complex sine would cancel.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "rsle/geometry.hpp"
#include "rsle/params.hpp"

namespace rsle {

/// sin^2 x + sinh^2 y  ( = |sin(x+iy)|^2 )
inline double abs_sin_sq(double x, double y) {
  const double sx = std::sin(x);
  const double shy = std::sinh(y);
  return sx * sx + shy * shy;
}

/// S(z) = sin(arg z) = Im(z)/|z| for z in H.
inline double s_invariant(Complex z) {
  if (!(z.imag() > 0.0))
    throw std::domain_error("s_invariant: point not in the upper half plane");
  return z.imag() / std::abs(z);
}

/// Chordal Green's function on H: (Im z)^{d-2} sin^{4a-1}(arg z).
inline double chordal_green(Complex z, const SleParams& params) {
  if (!(z.imag() > 0.0))
    throw std::domain_error("chordal_green: point not in the upper half plane");
  const double y = z.imag();
  return std::pow(y, params.d - 2.0) *
         std::pow(s_invariant(z), 4.0 * params.a - 1.0);
}

struct UvRho {
  double u;    // sinh y cosh y / |sin z|^2
  double v;    // sin x cos x / |sin z|^2
  double rho;  // Re(csc^2 z) = -v_x
};

/// The drift fields of the radial Loewner flow; cot(x+iy) = v - i u.
inline UvRho u_v_rho(CylinderPoint z) {
  if (!(z.y > 0.0)) throw std::domain_error("u_v_rho: y must be positive");
  const double sx = std::sin(z.x), cx = std::cos(z.x);
  const double shy = std::sinh(z.y), chy = std::cosh(z.y);
  const double s2 = sx * sx + shy * shy;
  UvRho out;
  out.u = shy * chy / s2;
  out.v = sx * cx / s2;
  out.rho = (sx * sx * chy * chy - cx * cx * shy * shy) / (s2 * s2);
  return out;
}

/// Lambda(z) = sinh y cosh y / |sin z|, the cylinder analogue of S(z).
inline double lambda_field(CylinderPoint z) {
  if (!(z.y > 0.0))
    throw std::domain_error("lambda_field: y must be positive");
  return std::sinh(z.y) * std::cosh(z.y) / std::sqrt(abs_sin_sq(z.x, z.y));
}

/// H(z) = |sin z|^p u(z)^zeta.  At kappa = 4 (p = 0, zeta = 1/2) this is
/// exactly u^{1/2}.
inline double h_field(CylinderPoint z, const SleParams& params) {
  if (!(z.y > 0.0)) throw std::domain_error("h_field: y must be positive");
  const double u = u_v_rho(z).u;
  const double upow =
      params.zeta == 0.5 ? std::sqrt(u) : std::pow(u, params.zeta);
  if (params.p == 0.0) return upow;
  return std::pow(std::sqrt(abs_sin_sq(z.x, z.y)), params.p) * upow;
}

/// The explicit kappa = 4 Green's function for radial SLE from 1 to 0 in the
/// disk, up to the package normalization fixed on the cylinder:
/// sqrt( (1-|z|^2) / (|z| |1-z|^2) ).
inline double radial_green_disk_k4(Complex z) {
  const double r = std::abs(z);
  if (!(r > 0.0 && r < 1.0) || z == Complex{1.0, 0.0})
    throw std::domain_error(
        "radial_green_disk_k4: point must lie in the punctured disk");
  return std::sqrt((1.0 - r * r) / (r * std::norm(1.0 - z)));
}

/// SK(z) = (1/2pi) (1+z)/(1-z); its real part is the Poisson kernel of D.
/// Finite on the closed disk except at the pole z = 1.
inline Complex schwarz_kernel_disk(Complex z) {
  if (!(std::norm(z) <= 1.0) || z == Complex{1.0, 0.0})
    throw std::domain_error("schwarz_kernel_disk: pole or point outside disk");
  return (1.0 + z) / (1.0 - z) / (2.0 * kPi);
}

struct DiskCoeffs {
  double F;  // 2r sin(theta) / (1 + r^2 - 2r cos(theta))
  double J;  // r (1 - r^2) / (1 + r^2 - 2r cos(theta))
};

inline DiskCoeffs disk_pde_coefficients(double r, double theta) {
  if (!(r > 0.0 && r < 1.0))
    throw std::domain_error("disk_pde_coefficients: need 0 < r < 1");
  const double den = 1.0 + r * r - 2.0 * r * std::cos(theta);
  return {2.0 * r * std::sin(theta) / den, r * (1.0 - r * r) / den};
}

/// d/dtheta of the coefficient F above, in closed form.
inline double disk_coefficient_f_theta(double r, double theta) {
  if (!(r > 0.0 && r < 1.0))
    throw std::domain_error("disk_coefficient_f_theta: need 0 < r < 1");
  const double den = 1.0 + r * r - 2.0 * r * std::cos(theta);
  return 2.0 * r * (std::cos(theta) * (1.0 + r * r) - 2.0 * r) / (den * den);
}

}  // namespace rsle
