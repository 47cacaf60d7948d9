#pragma once

// Monte Carlo estimation of the radial Green's function by two independent
// routes (threshold probabilities under the plain flow vs H * Phi under the
// tilted one), stopped-martingale diagnostics, and the eps^{2-d} scaling
// fit.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rsle/fields.hpp"
#include "rsle/loewner.hpp"
#include "rsle/parallel.hpp"
#include "rsle/sampler.hpp"
#include "rsle/stats.hpp"

namespace rsle {

struct LadderSpec {
  double eps0 = 0.08;
  int octaves = 3;

  std::vector<double> levels() const {
    if (!(eps0 > 0.0 && eps0 <= 1.0) || octaves < 0)
      throw std::invalid_argument("LadderSpec: need 0 < eps0 <= 1");
    std::vector<double> out;
    double e = eps0;
    for (int k = 0; k <= octaves; ++k, e *= 0.5) out.push_back(e);
    return out;
  }
};

struct RungResult {
  double eps = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t late_hits = 0;  // crossings in the last tenth of the horizon
  Estimate prob;
  bool truncation_flag = false;
};

/// Per-rung estimates of P{ups_infty <= eps * ups_0} from one shared bank of
/// simulated paths (upsilon is monotone, so one path serves every rung).
struct LadderResult {
  FlowKind kind = FlowKind::radial;
  Complex z;
  double ups0 = 0.0;
  double horizon = 0.0;
  std::uint64_t n = 0;
  std::uint64_t swallowed = 0;
  std::uint64_t budget_exhausted = 0;
  std::vector<RungResult> rungs;  // eps descending

  bool any_truncation() const {
    for (const auto& r : rungs)
      if (r.truncation_flag) return true;
    return false;
  }
};

inline LadderResult estimate_hit_ladder(FlowKind kind, Complex z,
                                        const SleParams& params,
                                        const std::vector<double>& eps_levels,
                                        std::uint64_t n, std::uint64_t seed,
                                        const SimOptions& opt = {},
                                        double horizon = 0.0,
                                        unsigned threads = 0) {
  if (eps_levels.empty() || n == 0)
    throw std::invalid_argument("estimate_hit_ladder: empty request");
  std::vector<double> levels = eps_levels;
  std::sort(levels.begin(), levels.end(), std::greater<double>());
  for (double e : levels)
    if (!(e > 0.0 && e <= 1.0))
      throw std::invalid_argument("estimate_hit_ladder: eps outside (0, 1]");
  const double eps_min = levels.back();
  if (horizon <= 0.0) horizon = default_horizon(eps_min, params);

  const std::size_t m = levels.size();
  const double ups0 = kind == FlowKind::radial
                          ? conformal_radius(wrap_point(z.real(), z.imag()))
                          : make_chordal_state(z).upsilon;
  std::vector<double> tau(n * m, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> end_reason(n, 0);

  StopRule base_stop;
  base_stop.horizon = horizon;
  base_stop.eps_rel = eps_min;

  parallel_for(n, threads, [&](std::uint64_t i) {
    const DrivingPath driving{seed, i};
    double* tau_i = &tau[i * m];
    std::size_t next = 0;
    auto observer = [&](const FlowState& before, const FlowState& after) {
      while (next < m && after.upsilon <= levels[next] * ups0) {
        const double la = std::log(before.upsilon);
        const double lb = std::log(after.upsilon);
        const double lv = std::log(levels[next] * ups0);
        const double frac = lb >= la ? 0.0 : (lv - la) / (lb - la);
        tau_i[next] = before.t + frac * (after.t - before.t);
        ++next;
      }
    };
    PathEnd end =
        kind == FlowKind::radial
            ? run_radial_flow(wrap_point(z.real(), z.imag()), params, driving,
                              opt, base_stop, observer)
            : run_chordal_flow(z, params, driving, opt, base_stop, observer);
    // Rungs the observer did not see crossed: an immediate threshold stop
    // (eps = 1) and the frozen conformal radius of a swallowed pocket.
    for (; next < m; ++next) {
      if (end.state.upsilon <= levels[next] * ups0)
        tau_i[next] = std::isnan(end.tau_eps) ? end.state.t : end.tau_eps;
      else
        break;
    }
    if (end.reason == EndReason::swallowed) end_reason[i] = 1;
    if (end.reason == EndReason::step_budget) end_reason[i] = 2;
  });

  LadderResult out;
  out.kind = kind;
  out.z = z;
  out.ups0 = ups0;
  out.horizon = horizon;
  out.n = n;
  out.rungs.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    RungResult& r = out.rungs[k];
    r.eps = levels[k];
    for (std::uint64_t i = 0; i < n; ++i) {
      const double tk = tau[i * m + k];
      if (!std::isnan(tk)) {
        ++r.hits;
        if (tk > 0.9 * horizon) ++r.late_hits;
      }
    }
    r.prob = bernoulli_estimate(r.hits, n);
    r.truncation_flag =
        r.hits > 0 && static_cast<double>(r.late_hits) >
                          0.01 * static_cast<double>(r.hits);
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    if (end_reason[i] == 1) ++out.swallowed;
    if (end_reason[i] == 2) ++out.budget_exhausted;
  }
  return out;
}

/// Fraction of paths whose conformal radius drops below eps * ups0 before
/// the horizon.
inline Estimate estimate_hit_prob(CylinderPoint z, const SleParams& params,
                                  double eps, std::uint64_t n,
                                  std::uint64_t seed,
                                  const SimOptions& opt = {},
                                  double horizon = 0.0, unsigned threads = 0) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("estimate_hit_prob: eps outside (0, 1]");
  if (n < 1000)
    throw std::invalid_argument("estimate_hit_prob: n >= 1000 required");
  const LadderResult lad = estimate_hit_ladder(
      FlowKind::radial, z.as_complex(), params, {eps}, n, seed, opt, horizon,
      threads);
  return lad.rungs.front().prob;
}

struct GreenEstimate {
  Estimate value;            // from the deepest rung
  std::vector<double> per_rung;
  bool trend_flag = false;   // non-monotone extrapolation trend beyond noise
};

/// Direct route: Ghat_eps = (eps * ups0)^{d-2} P_eps / c*.  The eps -> 0
/// limit of the absolute-threshold probability is c* G(z), so the relative
/// thresholds eps * ups0 used by the ladder are rescaled by ups0 here.
inline GreenEstimate green_direct(const LadderResult& ladder,
                                  const SleParams& params) {
  if (ladder.rungs.size() < 4 ||
      !(ladder.rungs.front().eps / ladder.rungs.back().eps >= 8.0 - 1e-9))
    throw std::invalid_argument(
        "green_direct: ladder must cover at least 3 octaves");
  GreenEstimate out;
  std::vector<double> se;
  for (const auto& r : ladder.rungs) {
    const double scale =
        std::pow(r.eps * ladder.ups0, params.d - 2.0) / params.c_star;
    out.per_rung.push_back(scale * r.prob.mean);
    se.push_back(scale * r.prob.std_err);
  }
  const std::size_t m = out.per_rung.size();
  out.value.mean = out.per_rung[m - 1];
  out.value.std_err = se[m - 1];
  out.value.n = ladder.n;
  // Richardson-style trend: successive differences should shrink; flag when
  // the last one grows beyond the combined noise.
  const double d_last = std::fabs(out.per_rung[m - 1] - out.per_rung[m - 2]);
  const double d_prev = std::fabs(out.per_rung[m - 2] - out.per_rung[m - 3]);
  const double noise = 2.0 * (se[m - 1] + se[m - 2] + se[m - 3]);
  out.trend_flag = d_last > d_prev + noise;
  const double widen = out.trend_flag ? 2.0 : 1.0;
  out.value.ci_lo = out.value.mean - 1.96 * widen * out.value.std_err;
  out.value.ci_hi = out.value.mean + 1.96 * widen * out.value.std_err;
  return out;
}

inline GreenEstimate green_direct(CylinderPoint z, const SleParams& params,
                                  const LadderSpec& spec, std::uint64_t n,
                                  std::uint64_t seed, const SimOptions& opt = {},
                                  double horizon = 0.0, unsigned threads = 0) {
  const LadderResult lad =
      estimate_hit_ladder(FlowKind::radial, z.as_complex(), params,
                          spec.levels(), n, seed, opt, horizon, threads);
  return green_direct(lad, params);
}

/// Factorized route: G(z) = H(z) Phi(z), with Phi estimated from tilted
/// hitting times. Restricted to kappa <= 4 (the heavy-tail guard of
/// estimate_phi would otherwise govern the variance).
inline Estimate green_via_phi(CylinderPoint z, const SleParams& params,
                              std::uint64_t n, std::uint64_t seed,
                              const TiltedOptions& opt = {},
                              unsigned threads = 0) {
  if (params.kappa > 4.0)
    throw std::invalid_argument("green_via_phi: kappa <= 4 required");
  const double H = h_field(z, params);
  Estimate phi = estimate_phi(z, params, n, seed, opt, threads);
  Estimate out;
  out.mean = H * phi.mean;
  out.std_err = H * phi.std_err;
  out.n = phi.n;
  out.ci_lo = H * phi.ci_lo;
  out.ci_hi = H * phi.ci_hi;
  return out;
}

// ---------------------------------------------------------------------------
// Stopped-martingale diagnostics.

enum class MartingaleKind { chordal_m, radial_n };

struct MartingaleCheck {
  std::vector<double> t_grid;
  std::vector<Estimate> means;
  double n0 = 0.0;
  std::uint64_t blowup_paths = 0;  // single-path value exceeded 1e3 * n0
};

/// Empirical means of the stopped local martingale
///   M_t = ups^{d-2} S^{4a-1}          (chordal flow)
///   N_t = e^{beta t} ups^{d-2} Lambda^{4a-1}   (radial flow)
/// over the given time grid. Swallowed paths contribute their value at the
/// stopping time from then on.
inline MartingaleCheck martingale_diagnostic(
    MartingaleKind kind, Complex z, const SleParams& params,
    std::vector<double> t_grid, std::uint64_t n, std::uint64_t seed,
    const SimOptions& opt = {}, unsigned threads = 0) {
  if (t_grid.empty()) throw std::invalid_argument("martingale: empty grid");
  std::sort(t_grid.begin(), t_grid.end());
  if (t_grid.front() < 0.0)
    throw std::invalid_argument("martingale: negative time");
  const bool radial = kind == MartingaleKind::radial_n;
  const double expo_u = params.d - 2.0;
  const double expo_l = 4.0 * params.a - 1.0;
  auto value_of = [&](const FlowState& s) {
    const double base = std::pow(s.upsilon, expo_u) * std::pow(s.lambda, expo_l);
    return radial ? std::exp(params.beta * s.t) * base : base;
  };

  const std::size_t m = t_grid.size();
  std::vector<double> vals(n * m, 0.0);
  StopRule stop;
  stop.horizon = t_grid.back();
  stop.marks = &t_grid;

  parallel_for(n, threads, [&](std::uint64_t i) {
    const DrivingPath driving{seed, i};
    double* vi = &vals[i * m];
    std::size_t next = 0;
    auto observer = [&](const FlowState& before, const FlowState& after) {
      if (next == 0 && t_grid[0] == 0.0) vi[next++] = value_of(before);
      while (next < m && after.t >= t_grid[next] - 1e-12) {
        vi[next] = value_of(after);
        ++next;
      }
    };
    PathEnd end = radial ? run_radial_flow(wrap_point(z.real(), z.imag()),
                                           params, driving, opt, stop, observer)
                         : run_chordal_flow(z, params, driving, opt, stop,
                                            observer);
    if (next == 0 && t_grid[0] == 0.0) {
      const FlowState s0 = radial
                               ? make_radial_state(wrap_point(z.real(), z.imag()))
                               : make_chordal_state(z);
      vi[next++] = value_of(s0);
    }
    const double frozen = value_of(end.state);
    for (; next < m; ++next) vi[next] = frozen;  // optional stopping
  });

  MartingaleCheck out;
  out.t_grid = t_grid;
  if (radial) {
    const CylinderPoint w = wrap_point(z.real(), z.imag());
    out.n0 = std::pow(conformal_radius(w), expo_u) *
             std::pow(lambda_field(w), expo_l);
  } else {
    out.n0 = std::pow(z.imag(), expo_u) * std::pow(s_invariant(z), expo_l);
  }
  for (std::size_t k = 0; k < m; ++k) {
    RunningStat stat;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double v = vals[i * m + k];
      stat.add(v);
      if (k + 1 == m && v > 1e3 * out.n0) ++out.blowup_paths;
    }
    out.means.push_back(make_estimate(stat));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scaling fit.

/// Weighted least-squares slope of log P vs log eps over the ladder. For
/// P ~ eps^{2-d} the expected slope is 2 - d. Rungs with zero hits are
/// dropped; at least 4 must survive.
inline LineFit exponent_fit(const LadderResult& ladder) {
  std::vector<double> xs, ys, sig;
  for (const auto& r : ladder.rungs) {
    if (r.hits == 0) continue;
    xs.push_back(std::log(r.eps));
    ys.push_back(std::log(r.prob.mean));
    sig.push_back(r.prob.std_err / r.prob.mean);
  }
  if (xs.size() < 4)
    throw std::invalid_argument(
        "exponent_fit: fewer than 4 rungs with nonzero counts");
  return weighted_least_squares(xs, ys, sig);
}

}  // namespace rsle
