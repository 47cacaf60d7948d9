#pragma once

// Cylinder geometry and the conformal maps between the upper half plane H,
// the unit disk D, and the half-infinite cylinder H* (H with x identified
// modulo pi).

#include <cmath>
#include <complex>
#include <stdexcept>

#include "rsle/params.hpp"

namespace rsle {

using Complex = std::complex<double>;

/// A point x + iy on the cylinder H*, with x canonicalized to (-pi/2, pi/2].
struct CylinderPoint {
  double x;
  double y;

  Complex as_complex() const { return {x, y}; }
};

/// Canonicalize a raw x coordinate modulo pi.  Representatives differing by
/// an integer multiple of pi map to the same point; the boundary convention
/// sends -pi/2 to +pi/2.
inline CylinderPoint wrap_point(double x_raw, double y) {
  if (!(y > 0.0)) throw std::domain_error("wrap_point: y must be positive");
  double x = std::remainder(x_raw, kPi);  // in [-pi/2, pi/2]
  if (x <= -0.5 * kPi) x += kPi;
  return {x, y};
}

enum class MapKind { half_to_disk, hstar_to_disk, half_to_hstar };

/**
 * The three fixed maps:
 *
 *   phi(z) = (i - z)/(i + z)   H  -> D,  phi(i) = 0, phi(0) = 1
 *   psi(z) = exp(2iz)          H* -> D \ {0}
 *   f(z)   = psi^{-1}(phi(z))  H  -> H*, principal-log branch
 *
 * The branch of f is the one continuous on H minus the ray i[1,inf), with
 * f(0) = 0 and f'(0) = 1, so that psi(f(z)) = phi(z) identically.
 */
inline Complex transform(Complex z, MapKind which) {
  constexpr Complex kI{0.0, 1.0};
  switch (which) {
    case MapKind::half_to_disk: {
      if (!(z.imag() > 0.0))
        throw std::domain_error("transform: point not in the upper half plane");
      return (kI - z) / (kI + z);
    }
    case MapKind::hstar_to_disk: {
      if (!(z.imag() > 0.0))
        throw std::domain_error("transform: point not in the cylinder");
      return std::exp(2.0 * kI * z);
    }
    case MapKind::half_to_hstar: {
      if (!(z.imag() > 0.0))
        throw std::domain_error("transform: point not in the upper half plane");
      const Complex w = (kI - z) / (kI + z);
      return Complex{0.0, -0.5} * std::log(w);
    }
  }
  throw std::logic_error("transform: unknown map");
}

enum class Domain { disk, hstar };

/// One-half the conformal radius: (1-|z|^2)/2 in the disk and
/// sinh(y) cosh(y) on the cylinder.  Boundary points are rejected.
inline double conformal_radius(Complex z, Domain dom) {
  if (dom == Domain::disk) {
    const double r2 = std::norm(z);
    if (!(r2 < 1.0))
      throw std::domain_error("conformal_radius: point not inside the disk");
    return 0.5 * (1.0 - r2);
  }
  const double y = z.imag();
  if (!(y > 0.0))
    throw std::domain_error("conformal_radius: point not inside the cylinder");
  return std::sinh(y) * std::cosh(y);
}

inline double conformal_radius(CylinderPoint z) {
  return conformal_radius(z.as_complex(), Domain::hstar);
}

}  // namespace rsle
