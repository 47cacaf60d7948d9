#pragma once

// Monte Carlo bookkeeping: streaming moments, interval estimates, the
// Kolmogorov-Smirnov distance, and weighted least squares.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rsle {

/// A Monte Carlo result. ci95 is mean +/- 1.96 stderr except for rare-count
/// Bernoulli estimates, which use the Wilson interval.
struct Estimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Welford accumulator with exact (order-fixed) merging.
struct RunningStat {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningStat& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
  }
  double variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
  double std_error() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

inline Estimate make_estimate(const RunningStat& s) {
  Estimate e;
  e.mean = s.mean;
  e.std_err = s.std_error();
  e.n = s.n;
  e.ci_lo = e.mean - 1.96 * e.std_err;
  e.ci_hi = e.mean + 1.96 * e.std_err;
  return e;
}

inline std::pair<double, double> wilson_interval(std::uint64_t successes,
                                                 std::uint64_t n,
                                                 double z = 1.96) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n = 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Estimate for a Bernoulli count; the Wilson interval replaces the normal
/// one when either count is below 30.
inline Estimate bernoulli_estimate(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bernoulli_estimate: n = 0");
  Estimate e;
  const double nn = static_cast<double>(n);
  e.mean = static_cast<double>(successes) / nn;
  e.std_err = std::sqrt(e.mean * (1.0 - e.mean) / nn);
  e.n = n;
  if (successes < 30 || n - successes < 30) {
    auto [lo, hi] = wilson_interval(successes, n);
    e.ci_lo = lo;
    e.ci_hi = hi;
  } else {
    e.ci_lo = e.mean - 1.96 * e.std_err;
    e.ci_hi = e.mean + 1.96 * e.std_err;
  }
  return e;
}

/// Kolmogorov-Smirnov distance between samples and a reference CDF.
template <class Cdf>
double ks_distance(std::vector<double> samples, const Cdf& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - F);
    d = std::max(d, F - static_cast<double>(i) / n);
  }
  return d;
}

struct LineFit {
  double slope = 0.0;
  double slope_std_err = 0.0;
  double intercept = 0.0;
};

/// Weighted least squares y = intercept + slope * x with per-point sigmas.
inline LineFit weighted_least_squares(const std::vector<double>& x,
                                      const std::vector<double>& y,
                                      const std::vector<double>& sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
    throw std::invalid_argument("weighted_least_squares: bad inputs");
  double W = 0, Wx = 0, Wy = 0, Wxx = 0, Wxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = sigma[i] > 0 ? sigma[i] : 1e-12;
    const double w = 1.0 / (s * s);
    W += w;
    Wx += w * x[i];
    Wy += w * y[i];
    Wxx += w * x[i] * x[i];
    Wxy += w * x[i] * y[i];
  }
  const double delta = W * Wxx - Wx * Wx;
  if (!(delta > 0))
    throw std::invalid_argument("weighted_least_squares: degenerate design");
  LineFit fit;
  fit.slope = (W * Wxy - Wx * Wy) / delta;
  fit.intercept = (Wxx * Wy - Wx * Wxy) / delta;
  fit.slope_std_err = std::sqrt(W / delta);
  return fit;
}

}  // namespace rsle
