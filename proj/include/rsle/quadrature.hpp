#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature on a finite interval.

#include <cmath>
#include <stdexcept>

namespace rsle {

namespace detail {

// K15 abscissae on [0,1] side of the symmetric rule; even indices are the
// embedded G7 points.
inline constexpr double kK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gauss_kronrod_15(const F& f, double a, double b, double* kronrod,
                      double* err) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * kK15Nodes[i];
    const double fsum =
        (i == 7) ? f(c) : f(c - dx) + f(c + dx);
    resk += kK15Weights[i] * fsum;
    if (i % 2 == 1) resg += kG7Weights[i / 2] * fsum;
  }
  *kronrod = resk * half;
  *err = std::fabs((resk - resg) * half);
}

template <class F>
double integrate_recurse(const F& f, double a, double b, double tol,
                         int depth) {
  double val, err;
  gauss_kronrod_15(f, a, b, &val, &err);
  if (err <= tol || depth > 48) return val;
  const double c = 0.5 * (a + b);
  return integrate_recurse(f, a, c, 0.5 * tol, depth + 1) +
         integrate_recurse(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Integrate f over [a,b] by adaptive bisection of a (G7,K15) pair until the
/// local Kronrod error estimate is below rel_tol * |coarse integral|.
template <class F>
double integrate_adaptive(const F& f, double a, double b,
                          double rel_tol = 1e-12, double abs_floor = 1e-300) {
  if (!(b > a)) throw std::invalid_argument("integrate_adaptive: empty range");
  double coarse, err;
  detail::gauss_kronrod_15(f, a, b, &coarse, &err);
  const double tol = std::max(rel_tol * std::fabs(coarse), abs_floor);
  return detail::integrate_recurse(f, a, b, tol, 0);
}

}  // namespace rsle
