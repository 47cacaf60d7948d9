#pragma once

// The tilted (two-sided radial) diffusion on the cylinder, its hitting-time
// functional Phi(z) = E*[exp(-beta T)], and the one-dimensional angle
// process with its invariant density.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsle/fields.hpp"
#include "rsle/geometry.hpp"
#include "rsle/parallel.hpp"
#include "rsle/params.hpp"
#include "rsle/quadrature.hpp"
#include "rsle/rng.hpp"
#include "rsle/stats.hpp"

namespace rsle {

/// The tilted process is killed at |Z| <= delta_stop and the remaining
/// travel time is covered by the deterministic bound |Z|^2 / a, reported as
/// one-sided bias through truncation_flag when it exceeds tol_T.
struct TiltedOptions {
  double dt_base = 1e-3;
  double delta_stop = 1e-3;
  double tol_T = 1e-4;
  std::uint64_t max_steps = 20'000'000;
};

struct TiltedState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

struct HitSample {
  double t_hat = 0.0;       // stopping time plus remainder bound
  double stopped_at = 0.0;  // |Z| at the stop
  bool truncation_flag = false;
  std::uint64_t steps = 0;
};

/// Girsanov bookkeeping: the plain drift a*v tilted by (1-4a)*v.
inline double tilted_drift_coefficient(const SleParams& params) {
  return (1.0 - 4.0 * params.a) + params.a;  // = 1 - 3a
}

/// One Euler-Maruyama step of dX = (1-3a) v dt, dY/dt = -a u, with
/// dt_eff = dt_base * min(1, |Z|^2).
inline void step_tilted(TiltedState& s, double dW_unit, double dt,
                        const SleParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_tilted: dt must be > 0");
  const UvRho f = u_v_rho({s.x, s.y});
  s.x += (1.0 - 3.0 * params.a) * f.v * dt + dW_unit * std::sqrt(dt);
  s.y -= params.a * f.u * dt;
  s.t += dt;
  s.x = std::remainder(s.x, kPi);
  if (s.x <= -0.5 * kPi) s.x += kPi;
}

/// Run the tilted flow from z until |Z| <= delta_stop.
template <class Driving>
HitSample simulate_to_hit(CylinderPoint z, const SleParams& params,
                          const Driving& driving,
                          const TiltedOptions& opt = {}) {
  if (!(z.y > 0.0))
    throw std::domain_error("simulate_to_hit: interior point required");
  TiltedState s{z.x, z.y, 0.0};
  const double stop2 = opt.delta_stop * opt.delta_stop;
  HitSample out;
  std::uint64_t step = 0;
  double r2 = s.x * s.x + s.y * s.y;
  while (r2 > stop2) {
    if (step >= opt.max_steps)
      throw std::runtime_error(
          "simulate_to_hit: step budget exhausted at |Z| = " +
          std::to_string(std::sqrt(r2)) + ", t = " + std::to_string(s.t));
    const double dt = opt.dt_base * std::min(1.0, r2);
    step_tilted(s, driving.unit_normal(step), dt, params);
    ++step;
    if (!(s.y > 0.0))
      throw std::runtime_error(
          "simulate_to_hit: Y reached 0 before |Z| <= delta_stop "
          "(discretization fault; reduce dt_base)");
    r2 = s.x * s.x + s.y * s.y;
  }
  const double remainder = r2 / params.a;
  out.t_hat = s.t + remainder;
  out.stopped_at = std::sqrt(r2);
  out.truncation_flag = remainder > opt.tol_T;
  out.steps = step;
  return out;
}

/// Raised when the kappa > 4 estimator's effective sample size collapses.
struct HeavyTailError : std::runtime_error {
  double ess;
  HeavyTailError(double ess_, std::uint64_t n)
      : std::runtime_error("estimate_phi: effective sample size " +
                           std::to_string(ess_) + " below 1% of n = " +
                           std::to_string(n)),
        ess(ess_) {}
};

/// Phi(z) = E*[exp(-beta T)] over n independent hitting times.
/// At kappa = 4 (beta = 0) the answer is identically 1 and no simulation
/// is run. For kappa > 4 the summand exp(|beta| T) is heavy-tailed; the
/// estimator refuses when the effective sample size drops below 1% of n.
inline Estimate estimate_phi(CylinderPoint z, const SleParams& params,
                             std::uint64_t n, std::uint64_t seed,
                             const TiltedOptions& opt = {},
                             unsigned threads = 0) {
  if (n < 100) throw std::invalid_argument("estimate_phi: n >= 100 required");
  if (params.beta == 0.0) {
    Estimate e;
    e.mean = 1.0;
    e.std_err = 0.0;
    e.n = n;
    e.ci_lo = e.ci_hi = 1.0;
    return e;
  }
  std::vector<double> w(n);
  parallel_for(n, threads, [&](std::uint64_t i) {
    const DrivingPath path{seed, i};
    const HitSample h = simulate_to_hit(z, params, path, opt);
    w[i] = std::exp(-params.beta * h.t_hat);
  });
  RunningStat stat;
  double sum = 0.0, sum2 = 0.0;
  for (double wi : w) {
    stat.add(wi);
    sum += wi;
    sum2 += wi * wi;
  }
  if (params.beta < 0.0) {
    const double ess = sum * sum / sum2;
    if (ess < 0.01 * static_cast<double>(n)) throw HeavyTailError(ess, n);
  }
  return make_estimate(stat);
}

// ---------------------------------------------------------------------------
// The angle process.

enum class ThetaMeasure { plain, tilted };

struct ThetaRun {
  bool absorbed = false;
  double absorption_time = 0.0;
  double theta_end = 0.0;
};

/// dTheta = (1-2a) cot(Theta) dt + dB under the plain measure (absorbed at
/// {0, pi} in finite time) and dTheta = 2a cot(Theta) dt + dW under the
/// tilted one (survives; overshoots of the boundary within a step are
/// reflected back).
template <class Driving, class Observer>
ThetaRun run_theta(double theta0, const SleParams& params,
                   ThetaMeasure measure, double horizon, double dt,
                   const Driving& driving, Observer&& observe) {
  if (!(theta0 > 0.0 && theta0 < kPi))
    throw std::domain_error("run_theta: theta0 must lie in (0, pi)");
  const double c =
      measure == ThetaMeasure::plain ? 1.0 - 2.0 * params.a : 2.0 * params.a;
  const double sdt = std::sqrt(dt);
  double th = theta0;
  double t = 0.0;
  std::uint64_t step = 0;
  while (t < horizon) {
    // The cot drift diverges at the boundary; clamp the displacement to one
    // radian per step so an excursion below ~a*dt cannot leap across the
    // strip. The clamp only binds there, a region of invariant mass below
    // 1e-10 at the step sizes in use.
    const double drift = std::clamp(c / std::tan(th) * dt, -1.0, 1.0);
    th += drift + sdt * driving.unit_normal(step);
    t += dt;
    ++step;
    if (measure == ThetaMeasure::plain) {
      if (th <= 0.0 || th >= kPi) return {true, t, th};
    } else {
      if (th < 0.0) th = -th;
      if (th > kPi) th = 2.0 * kPi - th;
      if (th <= 0.0 || th >= kPi)
        throw std::runtime_error(
            "run_theta: tilted path crossed the boundary "
            "(discretization fault; reduce dt)");
    }
    observe(t, th);
  }
  return {false, 0.0, th};
}

template <class Driving>
ThetaRun run_theta(double theta0, const SleParams& params,
                   ThetaMeasure measure, double horizon, double dt,
                   const Driving& driving) {
  return run_theta(theta0, params, measure, horizon, dt, driving,
                   [](double, double) {});
}

/// The invariant density f(theta) = (c*/2) sin^{4a} theta with its CDF on a
/// fixed grid (composite Simpson) and the inverse CDF by bisection.
class ThetaDensity {
 public:
  explicit ThetaDensity(const SleParams& params)
      : power_(4.0 * params.a), cdf_(kCells + 1, 0.0) {
    const double h = kPi / kCells;
    double acc = 0.0;
    for (int i = 0; i < kCells; ++i) {
      const double a = i * h, b = a + h;
      acc += h / 6.0 * (pdf_raw(a) + 4.0 * pdf_raw(0.5 * (a + b)) + pdf_raw(b));
      cdf_[i + 1] = acc;
    }
    norm_ = acc;
    for (auto& c : cdf_) c /= norm_;
    cdf_.back() = 1.0;
  }

  double pdf(double theta) const { return pdf_raw(theta) / norm_; }

  double cdf(double theta) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= kPi) return 1.0;
    const double pos = theta / kPi * kCells;
    const int i = std::min(static_cast<int>(pos), kCells - 1);
    const double frac = pos - i;
    return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  }

  double quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0))
      throw std::invalid_argument("ThetaDensity::quantile: u outside [0,1]");
    double lo = 0.0, hi = kPi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  static constexpr int kCells = 8192;
  double pdf_raw(double theta) const {
    return std::pow(std::sin(theta), power_);
  }
  double power_;
  double norm_;
  std::vector<double> cdf_;
};

/// Long-run sampling protocol for the tilted angle process: independent
/// chains started at pi/2, each discarded for burn_in time units and then
/// sampled every thin units.
struct StationaryOptions {
  std::uint64_t chains = 100;
  double burn_in = 10.0;
  double thin = 1.0;
  double dt = 1e-3;
};

inline std::vector<double> sample_stationary_theta(
    const SleParams& params, std::uint64_t n_samples, std::uint64_t seed,
    const StationaryOptions& opt = {}, unsigned threads = 0) {
  if (opt.chains == 0 || n_samples == 0)
    throw std::invalid_argument("sample_stationary_theta: empty request");
  const std::uint64_t per =
      (n_samples + opt.chains - 1) / opt.chains;
  std::vector<double> all(opt.chains * per, 0.0);
  parallel_for(opt.chains, threads, [&](std::uint64_t c) {
    const DrivingPath path{seed, c};
    const double horizon = opt.burn_in + (static_cast<double>(per) + 0.5) * opt.thin;
    std::uint64_t got = 0;
    double next_sample = opt.burn_in + opt.thin;
    run_theta(0.5 * kPi, params, ThetaMeasure::tilted, horizon, opt.dt, path,
              [&](double t, double th) {
                if (got < per && t >= next_sample) {
                  all[c * per + got] = th;
                  ++got;
                  next_sample += opt.thin;
                }
              });
  });
  all.resize(n_samples);
  return all;
}

struct KsResult {
  double statistic = 0.0;
  bool pass = false;
};

/// Kolmogorov-Smirnov distance between tilted-process samples and the CDF of
/// f(theta) = (c*/2) sin^{4a} theta.
inline KsResult stationary_density_test(const std::vector<double>& samples,
                                        const SleParams& params,
                                        double threshold = 0.02) {
  if (samples.size() < 1000)
    throw std::invalid_argument(
        "stationary_density_test: at least 1000 samples required");
  const ThetaDensity density(params);
  const double ks =
      ks_distance(samples, [&](double x) { return density.cdf(x); });
  return {ks, ks < threshold};
}

}  // namespace rsle
