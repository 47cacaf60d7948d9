#pragma once

// Numerical solvers for the radial Loewner flow on the cylinder H* and the
// chordal Loewner flow on H, with derivative tracking through the integral
// of csc^2 (resp. 1/Z^2), conformal-radius and Lambda tracking, and
// first-crossing detection for conformal-radius thresholds.
//
// Time stepping is a stochastic Heun step (trapezoidal drift, additive
// noise) with step size dt_eff = dt_base * min(1, c_adapt |sin Z|^2), which
// shrinks near the cot singularity. The derivative integral is accumulated
// by the trapezoid rule on the same grid.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rsle/fields.hpp"
#include "rsle/geometry.hpp"
#include "rsle/params.hpp"
#include "rsle/rng.hpp"

namespace rsle {

struct SimOptions {
  double dt_base = 1e-3;
  double c_adapt = 1.0;
  double swallow_floor = 1e-28;  // on |sin Z|^2 (radial) or |Z|^2 (chordal)
  // Secondary absorption criterion: once Y collapses this far the image
  // point is riding the hull boundary, Y decays at rate ~a/X^2, and the
  // conformal radius has long since frozen; stopping here avoids underflow.
  double y_floor = 1e-15;
  std::uint64_t max_steps = 50'000'000;
};

/// Evolving state of one Loewner trajectory.
///
/// z              current image point Z_t = X_t + i Y_t
/// deriv_integral int_0^t csc^2 Z_s ds (radial) or int_0^t Z_s^{-2} ds
///                (chordal); |h_t'| = exp(-a Re .)
/// upsilon        sinh Y cosh Y / |h'| (radial), Y / |g'| (chordal)
/// lambda         sinh Y cosh Y / |sin Z| (radial), S = Y/|Z| (chordal)
struct FlowState {
  Complex z;
  Complex deriv_integral{0.0, 0.0};
  double t = 0.0;
  double upsilon = 0.0;
  double lambda = 0.0;
};

enum class StepStatus { ok, swallowed };
enum class EndReason { horizon, threshold, swallowed, step_budget };

struct StopRule {
  double horizon = 1.0;
  double eps_rel = 0.0;  // stop when upsilon <= eps_rel * upsilon(0); 0 = off
  const std::vector<double>* marks = nullptr;  // sorted times to land on
};

struct PathEnd {
  EndReason reason = EndReason::horizon;
  FlowState state;
  double tau_eps = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t steps = 0;
};

namespace detail {

struct Trig {
  double sx, cx, shy, chy, s2;
};

inline Trig trig_eval(double x, double y) {
  Trig t;
  t.sx = std::sin(x);
  t.cx = std::cos(x);
  t.shy = std::sinh(y);  // keeps full precision for tiny y
  t.chy = std::cosh(y);
  t.s2 = t.sx * t.sx + t.shy * t.shy;
  return t;
}

inline Complex cot_of(const Trig& t) {
  return {t.sx * t.cx / t.s2, -t.shy * t.chy / t.s2};
}

inline Complex csc2_of(const Trig& t) {
  const double s4 = t.s2 * t.s2;
  return {(t.sx * t.sx * t.chy * t.chy - t.cx * t.cx * t.shy * t.shy) / s4,
          -2.0 * t.sx * t.cx * t.shy * t.chy / s4};
}

}  // namespace detail

inline FlowState make_radial_state(CylinderPoint z0) {
  FlowState s;
  s.z = z0.as_complex();
  const double sc = std::sinh(z0.y) * std::cosh(z0.y);
  s.upsilon = sc;
  s.lambda = sc / std::sqrt(abs_sin_sq(z0.x, z0.y));
  return s;
}

inline FlowState make_chordal_state(Complex z0) {
  if (!(z0.imag() > 0.0))
    throw std::domain_error("make_chordal_state: Im z must be positive");
  FlowState s;
  s.z = z0;
  s.upsilon = z0.imag();
  s.lambda = z0.imag() / std::abs(z0);
  return s;
}

/// One stochastic Heun step of dZ = a cot(Z) dt + dB (dB real).
/// Returns swallowed when any stage lands within the singular floor (or
/// below the Y absorption floor), in which case the state is left at its
/// pre-step value.
inline StepStatus step_radial(FlowState& s, double dB, double dt,
                              const SleParams& params,
                              double swallow_floor = 1e-12,
                              double y_floor = 1e-15) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_radial: dt must be > 0");
  const detail::Trig e1 = detail::trig_eval(s.z.real(), s.z.imag());
  if (e1.s2 < swallow_floor) return StepStatus::swallowed;
  const Complex k1 = params.a * detail::cot_of(e1);
  const Complex zp = s.z + k1 * dt + dB;
  const detail::Trig e2 = detail::trig_eval(zp.real(), zp.imag());
  if (e2.s2 < swallow_floor || !(zp.imag() > y_floor))
    return StepStatus::swallowed;
  const Complex k2 = params.a * detail::cot_of(e2);
  const Complex znew = s.z + 0.5 * (k1 + k2) * dt + dB;
  const detail::Trig e3 = detail::trig_eval(znew.real(), znew.imag());
  if (e3.s2 < swallow_floor || !(znew.imag() > y_floor))
    return StepStatus::swallowed;
  s.deriv_integral += 0.5 * (detail::csc2_of(e1) + detail::csc2_of(e3)) * dt;
  s.z = znew;
  s.t += dt;
  const double sc = e3.shy * e3.chy;
  s.upsilon = sc * std::exp(params.a * s.deriv_integral.real());
  s.lambda = sc / std::sqrt(e3.s2);
  return StepStatus::ok;
}

/// One stochastic Heun step of dZ = (a/Z) dt + dB on the half plane.
inline StepStatus step_chordal(FlowState& s, double dB, double dt,
                               const SleParams& params,
                               double swallow_floor = 1e-12,
                               double y_floor = 1e-15) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_chordal: dt must be > 0");
  if (std::norm(s.z) < swallow_floor) return StepStatus::swallowed;
  const Complex k1 = params.a / s.z;
  const Complex zp = s.z + k1 * dt + dB;
  if (std::norm(zp) < swallow_floor || !(zp.imag() > y_floor))
    return StepStatus::swallowed;
  const Complex k2 = params.a / zp;
  const Complex znew = s.z + 0.5 * (k1 + k2) * dt + dB;
  if (std::norm(znew) < swallow_floor || !(znew.imag() > y_floor))
    return StepStatus::swallowed;
  const Complex inv0 = 1.0 / (s.z * s.z);
  const Complex inv1 = 1.0 / (znew * znew);
  s.deriv_integral += 0.5 * (inv0 + inv1) * dt;
  s.z = znew;
  s.t += dt;
  s.upsilon = znew.imag() * std::exp(params.a * s.deriv_integral.real());
  s.lambda = znew.imag() / std::abs(znew);
  return StepStatus::ok;
}

namespace detail {

template <bool Radial, class Driving, class Observer>
PathEnd run_flow(Complex z0, const SleParams& params, const Driving& driving,
                 const SimOptions& opt, const StopRule& stop,
                 Observer&& observe) {
  PathEnd out;
  FlowState& s = out.state;
  if constexpr (Radial) {
    s = make_radial_state(wrap_point(z0.real(), z0.imag()));
  } else {
    s = make_chordal_state(z0);
  }
  const double ups0 = s.upsilon;
  const double level = stop.eps_rel > 0.0 ? stop.eps_rel * ups0 : -1.0;
  if (level > 0.0 && s.upsilon <= level) {
    out.reason = EndReason::threshold;
    out.tau_eps = 0.0;
    return out;
  }
  std::size_t mark_idx = 0;
  FlowState prev = s;
  for (std::uint64_t step = 0;; ++step) {
    if (step >= opt.max_steps) {
      out.reason = EndReason::step_budget;
      out.steps = step;
      return out;
    }
    const double scale =
        Radial ? abs_sin_sq(s.z.real(), s.z.imag()) : std::norm(s.z);
    double dt = opt.dt_base * std::min(1.0, opt.c_adapt * scale);
    dt = std::min(dt, stop.horizon - s.t);
    if (stop.marks) {
      while (mark_idx < stop.marks->size() &&
             (*stop.marks)[mark_idx] <= s.t + 1e-15)
        ++mark_idx;
      if (mark_idx < stop.marks->size())
        dt = std::min(dt, (*stop.marks)[mark_idx] - s.t);
    }
    if (!(dt > 0.0)) dt = opt.dt_base * 1e-6;  // fp guard at end points
    const double dB = driving.increment(step, dt);
    prev = s;
    const StepStatus st =
        Radial ? step_radial(s, dB, dt, params, opt.swallow_floor, opt.y_floor)
               : step_chordal(s, dB, dt, params, opt.swallow_floor,
                              opt.y_floor);
    if (st == StepStatus::swallowed) {
      out.reason = EndReason::swallowed;
      out.steps = step + 1;
      return out;
    }
    observe(prev, s);
    if (level > 0.0 && s.upsilon <= level) {
      // first crossing; linear interpolation in (t, log upsilon)
      const double la = std::log(prev.upsilon), lb = std::log(s.upsilon);
      const double frac = (std::log(level) - la) / (lb - la);
      out.tau_eps = prev.t + frac * (s.t - prev.t);
      out.reason = EndReason::threshold;
      out.steps = step + 1;
      return out;
    }
    if (s.t >= stop.horizon - 1e-12) {
      out.reason = EndReason::horizon;
      out.steps = step + 1;
      return out;
    }
  }
}

struct NullObserver {
  void operator()(const FlowState&, const FlowState&) const {}
};

}  // namespace detail

template <class Driving, class Observer = detail::NullObserver>
PathEnd run_radial_flow(CylinderPoint z0, const SleParams& params,
                        const Driving& driving, const SimOptions& opt,
                        const StopRule& stop, Observer&& observe = {}) {
  return detail::run_flow<true>(z0.as_complex(), params, driving, opt, stop,
                                std::forward<Observer>(observe));
}

template <class Driving, class Observer = detail::NullObserver>
PathEnd run_chordal_flow(Complex z0, const SleParams& params,
                         const Driving& driving, const SimOptions& opt,
                         const StopRule& stop, Observer&& observe = {}) {
  return detail::run_flow<false>(z0, params, driving, opt, stop,
                                 std::forward<Observer>(observe));
}

// ---------------------------------------------------------------------------
// Deterministic (zero-driving) solutions, used as oracles.

/// Solution of dh/dt = a cot(h), h_0 = z:  cos h_t = e^{-at} cos z.
/// The branch keeps Im h > 0 and returns the canonical representative.
inline Complex solve_radial_deterministic(Complex z, double t,
                                          const SleParams& params) {
  if (t == 0.0) return z;
  const Complex c = std::exp(-params.a * t) * std::cos(z);
  Complex h = std::acos(c);
  if (h.imag() < 0.0) h = -h;
  const CylinderPoint w = wrap_point(h.real(), h.imag());
  return w.as_complex();
}

/// Solution of dg/dt = a/g, g_0 = z:  g_t = sqrt(z^2 + 2at), Im >= 0.
/// A result on the real axis means the point was swallowed exactly now.
inline Complex solve_chordal_zero_driving(Complex z, double t,
                                          const SleParams& params) {
  Complex w = std::sqrt(z * z + 2.0 * params.a * t);
  if (w.imag() < 0.0) w = -w;
  return w;
}

/// Classic RK4 for dz/dt = f(z) with fixed step.
template <class F>
Complex rk4_integrate(Complex z0, double t_final, double dt, const F& f) {
  Complex z = z0;
  double t = 0.0;
  while (t < t_final - 1e-15) {
    const double h = std::min(dt, t_final - t);
    const Complex k1 = f(z);
    const Complex k2 = f(z + 0.5 * h * k1);
    const Complex k3 = f(z + 0.5 * h * k2);
    const Complex k4 = f(z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return z;
}

inline Complex solve_radial_rk4(Complex z, double t, double dt,
                                const SleParams& params) {
  const double a = params.a;
  return rk4_integrate(z, t, dt, [a](Complex w) {
    const detail::Trig e = detail::trig_eval(w.real(), w.imag());
    return a * detail::cot_of(e);
  });
}

inline Complex solve_chordal_rk4(Complex z, double t, double dt,
                                 const SleParams& params) {
  const double a = params.a;
  return rk4_integrate(z, t, dt, [a](Complex w) { return a / w; });
}

// ---------------------------------------------------------------------------
// Deterministic envelope for Y_t: -a coth Y <= dY/dt <= -a tanh Y gives
//   acosh(cosh(y0) e^{-at}) <= Y_t <= asinh(sinh(y0) e^{-at}),
// the lower bound clamped to 0 once cosh(y0) e^{-at} < 1.

inline double envelope_upper_y(double y0, double a, double t) {
  return std::asinh(std::sinh(y0) * std::exp(-a * t));
}

inline double envelope_lower_y(double y0, double a, double t) {
  const double c = std::cosh(y0) * std::exp(-a * t);
  return c > 1.0 ? std::acosh(c) : 0.0;
}

// ---------------------------------------------------------------------------
// Trajectory recording.

struct TrajectoryPoint {
  double t;
  double x;
  double y;
  double log_abs_deriv;
  double upsilon;
  double lambda;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  PathEnd end;
};

enum class FlowKind { radial, chordal };

/// Simulate one trajectory and record every stride-th accepted step
/// (plus the initial state).
template <class Driving>
Trajectory simulate_path(FlowKind kind, Complex z0, const SleParams& params,
                         const Driving& driving, const SimOptions& opt,
                         const StopRule& stop, std::uint64_t stride = 1) {
  Trajectory traj;
  std::uint64_t count = 0;
  auto record = [&](const FlowState& s) {
    traj.points.push_back({s.t, s.z.real(), s.z.imag(),
                           -params.a * s.deriv_integral.real(), s.upsilon,
                           s.lambda});
  };
  auto obs = [&](const FlowState& before, const FlowState& after) {
    if (count == 0) record(before);
    ++count;
    if (count % stride == 0) record(after);
  };
  traj.end = kind == FlowKind::radial
                 ? run_radial_flow(wrap_point(z0.real(), z0.imag()), params,
                                   driving, opt, stop, obs)
                 : run_chordal_flow(z0, params, driving, opt, stop, obs);
  if (traj.points.empty() || traj.points.back().t < traj.end.state.t)
    record(traj.end.state);
  return traj;
}

/// Default simulation horizon for a relative threshold eps_min: in the
/// conformal-radius clock, upsilon contracts like e^{-2at}, so crossings of
/// eps_min are essentially exhausted once e^{-2at} < eps_min/10.
inline double default_horizon(double eps_min, const SleParams& params) {
  if (!(eps_min > 0.0 && eps_min <= 1.0))
    throw std::invalid_argument("default_horizon: eps_min in (0,1] required");
  return std::log(10.0 / eps_min) / (2.0 * params.a);
}

}  // namespace rsle
