#pragma once

// Experiment orchestration: a RunConfig fully determines a run, and run()
// writes the result CSVs plus a manifest into the output directory.
//
// Exit categories: 0 success, 2 invalid config or precondition, 3 a
// numerical guard tripped (heavy-tail refusal, horizon truncation); partial
// results are still written in the latter case.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsle/csv.hpp"
#include "rsle/estimators.hpp"
#include "rsle/fields.hpp"
#include "rsle/geometry.hpp"
#include "rsle/loewner.hpp"
#include "rsle/params.hpp"
#include "rsle/pde_check.hpp"
#include "rsle/sampler.hpp"

namespace rsle {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsageError = 2, kNumericalGuard = 3 };

struct RunConfig {
  std::string command;  // params|eval|simulate|estimate-green|estimate-phi|
                        // martingale-check|stationary-test|pde-check|
                        // scaling-fit
  double kappa = 4.0;
  std::vector<std::array<double, 2>> points;
  std::string point_domain = "hstar";  // hstar | disk | half
  std::string flow = "radial";         // radial | chordal
  double eps0 = 0.08;
  int octaves = 3;
  std::uint64_t n = 10000;
  double dt = 1e-3;
  double c_adapt = 1.0;
  double swallow_floor = 1e-28;
  std::uint64_t max_steps = 50'000'000;
  double delta_stop = 1e-3;
  double tol_T = 1e-4;
  std::uint64_t seed = 1;
  double horizon = 0.0;  // 0 = derived from the deepest rung
  std::string out_dir = "out";
  unsigned threads = 0;  // 0 = RSLE_THREADS or hardware
  bool via_phi = false;
  // martingale-check
  std::string martingale_kind = "radial_N";  // radial_N | chordal_M
  std::vector<double> t_grid = {0.0, 0.05, 0.1, 0.2};
  // stationary-test
  std::uint64_t chains = 100;
  double burn_in = 10.0;
  double thin = 1.0;
  double theta_dt = 1e-3;
  double ks_threshold = 0.02;
  // pde-check
  std::string pde_equation = "hstar_h";  // disk | hstar_h | hstar_g4
  double grid_lo1 = -1.2, grid_hi1 = 1.2, grid_lo2 = 0.2, grid_hi2 = 2.0;
  double h = 1e-3;
  int grid_n1 = 33, grid_n2 = 33;
  // simulate
  std::uint64_t record_stride = 10;
};

// ---------------------------------------------------------------------------
// Config file I/O (JSON; flags override file values in the CLI layer).

inline void config_from_json(const nlohmann::json& j, RunConfig& c) {
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("command", c.command);
  get("kappa", c.kappa);
  if (j.contains("points")) {
    c.points.clear();
    for (const auto& p : j.at("points"))
      c.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  get("point_domain", c.point_domain);
  get("flow", c.flow);
  get("eps0", c.eps0);
  get("octaves", c.octaves);
  get("n", c.n);
  get("dt", c.dt);
  get("c_adapt", c.c_adapt);
  get("swallow_floor", c.swallow_floor);
  get("max_steps", c.max_steps);
  get("delta_stop", c.delta_stop);
  get("tol_T", c.tol_T);
  get("seed", c.seed);
  get("horizon", c.horizon);
  get("out_dir", c.out_dir);
  get("threads", c.threads);
  get("via_phi", c.via_phi);
  get("martingale_kind", c.martingale_kind);
  get("t_grid", c.t_grid);
  get("chains", c.chains);
  get("burn_in", c.burn_in);
  get("thin", c.thin);
  get("theta_dt", c.theta_dt);
  get("ks_threshold", c.ks_threshold);
  get("pde_equation", c.pde_equation);
  get("grid_lo1", c.grid_lo1);
  get("grid_hi1", c.grid_hi1);
  get("grid_lo2", c.grid_lo2);
  get("grid_hi2", c.grid_hi2);
  get("h", c.h);
  get("grid_n1", c.grid_n1);
  get("grid_n2", c.grid_n2);
  get("record_stride", c.record_stride);
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["kappa"] = c.kappa;
  j["points"] = nlohmann::json::array();
  for (const auto& p : c.points) j["points"].push_back({p[0], p[1]});
  j["point_domain"] = c.point_domain;
  j["flow"] = c.flow;
  j["eps0"] = c.eps0;
  j["octaves"] = c.octaves;
  j["n"] = c.n;
  j["dt"] = c.dt;
  j["c_adapt"] = c.c_adapt;
  j["swallow_floor"] = c.swallow_floor;
  j["max_steps"] = c.max_steps;
  j["delta_stop"] = c.delta_stop;
  j["tol_T"] = c.tol_T;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["via_phi"] = c.via_phi;
  j["martingale_kind"] = c.martingale_kind;
  j["t_grid"] = c.t_grid;
  j["chains"] = c.chains;
  j["burn_in"] = c.burn_in;
  j["thin"] = c.thin;
  j["theta_dt"] = c.theta_dt;
  j["ks_threshold"] = c.ks_threshold;
  j["pde_equation"] = c.pde_equation;
  j["grid_lo1"] = c.grid_lo1;
  j["grid_hi1"] = c.grid_hi1;
  j["grid_lo2"] = c.grid_lo2;
  j["grid_hi2"] = c.grid_hi2;
  j["h"] = c.h;
  j["grid_n1"] = c.grid_n1;
  j["grid_n2"] = c.grid_n2;
  j["record_stride"] = c.record_stride;
  return j;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  nlohmann::json j;
  in >> j;
  RunConfig c;
  config_from_json(j, c);
  return c;
}

// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<std::string> kResultColumns = {
    "quantity", "kappa", "x",     "y",     "eps",  "n",
    "mean",     "stderr", "ci_lo", "ci_hi", "seed"};

struct ResultRow {
  std::string quantity;
  double kappa, x, y;
  std::string eps;  // rung eps, grid time, or empty
  std::uint64_t n;
  double mean, std_err, ci_lo, ci_hi;
  std::uint64_t seed;

  std::vector<std::string> cells() const {
    return {quantity,         fmt_num(kappa),   fmt_num(x),
            fmt_num(y),       eps,              fmt_num(n),
            fmt_num(mean),    fmt_num(std_err), fmt_num(ci_lo),
            fmt_num(ci_hi),   fmt_num(seed)};
  }
};

inline void validate(const RunConfig& c) {
  static const std::vector<std::string> kCommands = {
      "params",       "eval",           "simulate",
      "estimate-green", "estimate-phi", "martingale-check",
      "stationary-test", "pde-check",   "scaling-fit"};
  bool known = false;
  for (const auto& k : kCommands) known |= k == c.command;
  if (!known) throw std::invalid_argument("unknown command: " + c.command);
  if (!(c.kappa > 0.0 && c.kappa < 8.0))
    throw std::invalid_argument("kappa must lie in (0, 8)");
  if (c.command != "params" && c.command != "stationary-test" &&
      c.command != "pde-check" && c.points.empty())
    throw std::invalid_argument("at least one --point is required");
  const bool needs_n = c.command == "simulate" ||
                       c.command == "estimate-green" ||
                       c.command == "estimate-phi" ||
                       c.command == "martingale-check" ||
                       c.command == "stationary-test" ||
                       c.command == "scaling-fit";
  if (needs_n && c.n == 0) throw std::invalid_argument("n must be positive");
  if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(c.eps0 > 0.0 && c.eps0 <= 1.0))
    throw std::invalid_argument("eps0 must lie in (0, 1]");
  if (c.octaves < 0) throw std::invalid_argument("octaves must be >= 0");
}

inline std::string quantity_row_eps(double v) { return fmt_num(v); }

}  // namespace detail

/// Execute one config; returns an ExitCode. All numerical work is replica-
/// parallel and merged by replica index, so outputs are independent of the
/// thread count.
inline int run(const RunConfig& config) {
  using nlohmann::json;
  const auto t_start = std::chrono::steady_clock::now();
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(config);
  json diagnostics = json::object();
  std::vector<std::string> outputs;
  int status = kOk;

  try {
    detail::validate(config);
    std::filesystem::create_directories(config.out_dir);
    const SleParams P = derive_params(config.kappa);
    SimOptions sim;
    sim.dt_base = config.dt;
    sim.c_adapt = config.c_adapt;
    sim.swallow_floor = config.swallow_floor;
    sim.max_steps = config.max_steps;
    TiltedOptions tilted;
    tilted.dt_base = config.dt;
    tilted.delta_stop = config.delta_stop;
    tilted.tol_T = config.tol_T;
    tilted.max_steps = config.max_steps;

    auto result_path = [&](const char* name) {
      return (std::filesystem::path(config.out_dir) / name).string();
    };

    if (config.command == "params") {
      const std::string path = result_path("params.csv");
      CsvWriter csv(path, {"kappa", "a", "d", "p", "zeta", "q", "beta",
                           "c_star"});
      csv.row({fmt_num(P.kappa), fmt_num(P.a), fmt_num(P.d), fmt_num(P.p),
               fmt_num(P.zeta), fmt_num(P.q), fmt_num(P.beta),
               fmt_num(P.c_star)});
      outputs.push_back(path);
    } else if (config.command == "eval") {
      const std::string path = result_path("results.csv");
      CsvWriter csv(path, detail::kResultColumns);
      auto scalar = [&](const char* q, double x, double y, double v) {
        detail::ResultRow r{q, P.kappa, x, y, "", 0, v, 0.0, v, v,
                            config.seed};
        csv.row(r.cells());
      };
      for (const auto& pt : config.points) {
        if (config.point_domain == "hstar") {
          const CylinderPoint z = wrap_point(pt[0], pt[1]);
          const UvRho w = u_v_rho(z);
          scalar("h_field", z.x, z.y, h_field(z, P));
          scalar("lambda", z.x, z.y, lambda_field(z));
          scalar("s_invariant", z.x, z.y, s_invariant(z.as_complex()));
          scalar("u", z.x, z.y, w.u);
          scalar("v", z.x, z.y, w.v);
          scalar("rho", z.x, z.y, w.rho);
          scalar("upsilon0", z.x, z.y, conformal_radius(z));
        } else if (config.point_domain == "disk") {
          const double r = pt[0], th = pt[1];
          const Complex z = r * std::exp(Complex{0.0, th});
          if (P.kappa == 4.0)
            scalar("green_disk_k4", r, th, radial_green_disk_k4(z));
          const Complex sk = schwarz_kernel_disk(z);
          scalar("schwarz_re", r, th, sk.real());
          scalar("schwarz_im", r, th, sk.imag());
          const DiskCoeffs fc = disk_pde_coefficients(r, th);
          scalar("coeff_F", r, th, fc.F);
          scalar("coeff_J", r, th, fc.J);
        } else if (config.point_domain == "half") {
          const Complex z{pt[0], pt[1]};
          scalar("chordal_green", pt[0], pt[1], chordal_green(z, P));
          scalar("s_invariant", pt[0], pt[1], s_invariant(z));
        } else {
          throw std::invalid_argument("unknown point_domain: " +
                                      config.point_domain);
        }
      }
      outputs.push_back(path);
    } else if (config.command == "simulate") {
      const bool radial = config.flow == "radial";
      if (!radial && config.flow != "chordal")
        throw std::invalid_argument("unknown flow: " + config.flow);
      const Complex z0{config.points[0][0], config.points[0][1]};
      StopRule stop;
      stop.horizon = config.horizon > 0.0
                         ? config.horizon
                         : default_horizon(config.eps0, P);
      for (std::uint64_t i = 0; i < config.n; ++i) {
        const DrivingPath driving{config.seed, i};
        const Trajectory traj = simulate_path(
            radial ? FlowKind::radial : FlowKind::chordal, z0, P, driving,
            sim, stop, config.record_stride);
        char name[32];
        std::snprintf(name, sizeof name, "path_%06llu.csv",
                      static_cast<unsigned long long>(i));
        const std::string path = result_path(name);
        CsvWriter csv(path,
                      {"t", "X", "Y", "log_abs_deriv", "upsilon", "lambda"});
        for (const auto& p : traj.points)
          csv.row({fmt_num(p.t), fmt_num(p.x), fmt_num(p.y),
                   fmt_num(p.log_abs_deriv), fmt_num(p.upsilon),
                   fmt_num(p.lambda)});
        outputs.push_back(path);
      }
    } else if (config.command == "estimate-green" ||
               config.command == "scaling-fit") {
      const bool radial = config.flow == "radial";
      if (!radial && config.flow != "chordal")
        throw std::invalid_argument("unknown flow: " + config.flow);
      const std::string path = result_path("results.csv");
      CsvWriter csv(path, detail::kResultColumns);
      const LadderSpec spec{config.eps0, config.octaves};
      bool truncated = false;
      for (const auto& pt : config.points) {
        const Complex z{pt[0], pt[1]};
        const LadderResult lad = estimate_hit_ladder(
            radial ? FlowKind::radial : FlowKind::chordal, z, P,
            spec.levels(), config.n, config.seed, sim, config.horizon,
            config.threads);
        truncated |= lad.any_truncation();
        for (const auto& rung : lad.rungs) {
          detail::ResultRow r{"hit_prob", P.kappa, pt[0], pt[1],
                              fmt_num(rung.eps), config.n, rung.prob.mean,
                              rung.prob.std_err, rung.prob.ci_lo,
                              rung.prob.ci_hi, config.seed};
          csv.row(r.cells());
        }
        if (config.command == "estimate-green") {
          const GreenEstimate g = green_direct(lad, P);
          detail::ResultRow r{"green_direct", P.kappa, pt[0], pt[1],
                              fmt_num(lad.rungs.back().eps), config.n,
                              g.value.mean, g.value.std_err, g.value.ci_lo,
                              g.value.ci_hi, config.seed};
          csv.row(r.cells());
          if (g.trend_flag) diagnostics["trend_flag"] = true;
          if (config.via_phi && radial) {
            const Estimate gp =
                green_via_phi(wrap_point(pt[0], pt[1]), P, config.n,
                              config.seed + 1, tilted, config.threads);
            detail::ResultRow r2{"green_via_phi", P.kappa, pt[0], pt[1], "",
                                 config.n, gp.mean, gp.std_err, gp.ci_lo,
                                 gp.ci_hi, config.seed + 1};
            csv.row(r2.cells());
          }
        } else {
          const LineFit fit = exponent_fit(lad);
          detail::ResultRow r{"slope", P.kappa, pt[0], pt[1], "", config.n,
                              fit.slope, fit.slope_std_err,
                              fit.slope - 1.96 * fit.slope_std_err,
                              fit.slope + 1.96 * fit.slope_std_err,
                              config.seed};
          csv.row(r.cells());
          diagnostics["expected_slope"] = 2.0 - P.d;
        }
      }
      outputs.push_back(path);
      if (truncated) {
        diagnostics["horizon_truncation"] = true;
        status = kNumericalGuard;
      }
    } else if (config.command == "estimate-phi") {
      const std::string path = result_path("results.csv");
      CsvWriter csv(path, detail::kResultColumns);
      for (const auto& pt : config.points) {
        const CylinderPoint z = wrap_point(pt[0], pt[1]);
        const Estimate phi = estimate_phi(z, P, config.n, config.seed,
                                          tilted, config.threads);
        detail::ResultRow r{"phi", P.kappa, z.x, z.y, "", config.n, phi.mean,
                            phi.std_err, phi.ci_lo, phi.ci_hi, config.seed};
        csv.row(r.cells());
        if (P.kappa <= 4.0) {
          const double H = h_field(z, P);
          detail::ResultRow r2{"green_via_phi", P.kappa, z.x, z.y, "",
                               config.n, H * phi.mean, H * phi.std_err,
                               H * phi.ci_lo, H * phi.ci_hi, config.seed};
          csv.row(r2.cells());
        }
      }
      outputs.push_back(path);
    } else if (config.command == "martingale-check") {
      const bool radial = config.martingale_kind == "radial_N";
      if (!radial && config.martingale_kind != "chordal_M")
        throw std::invalid_argument("unknown martingale_kind: " +
                                    config.martingale_kind);
      const std::string path = result_path("results.csv");
      CsvWriter csv(path, detail::kResultColumns);
      const Complex z{config.points[0][0], config.points[0][1]};
      const MartingaleCheck mc = martingale_diagnostic(
          radial ? MartingaleKind::radial_n : MartingaleKind::chordal_m, z, P,
          config.t_grid, config.n, config.seed, sim, config.threads);
      detail::ResultRow r0{"martingale_n0", P.kappa, z.real(), z.imag(), "",
                           config.n, mc.n0, 0.0, mc.n0, mc.n0, config.seed};
      csv.row(r0.cells());
      for (std::size_t k = 0; k < mc.t_grid.size(); ++k) {
        const Estimate& e = mc.means[k];
        detail::ResultRow r{"martingale_mean", P.kappa, z.real(), z.imag(),
                            fmt_num(mc.t_grid[k]), config.n, e.mean,
                            e.std_err, e.ci_lo, e.ci_hi, config.seed};
        csv.row(r.cells());
      }
      diagnostics["blowup_paths"] = mc.blowup_paths;
      outputs.push_back(path);
    } else if (config.command == "stationary-test") {
      StationaryOptions opt;
      opt.chains = config.chains;
      opt.burn_in = config.burn_in;
      opt.thin = config.thin;
      opt.dt = config.theta_dt;
      const std::vector<double> samples = sample_stationary_theta(
          P, config.n, config.seed, opt, config.threads);
      const KsResult ks =
          stationary_density_test(samples, P, config.ks_threshold);
      const std::string path = result_path("results.csv");
      CsvWriter csv(path, detail::kResultColumns);
      detail::ResultRow r{"ks_statistic", P.kappa, 0.0, 0.0, "", config.n,
                          ks.statistic, 0.0, ks.statistic, ks.statistic,
                          config.seed};
      csv.row(r.cells());
      diagnostics["ks_pass"] = ks.pass;
      outputs.push_back(path);
    } else if (config.command == "pde-check") {
      GridSpec grid;
      grid.domain = config.pde_equation == "disk" ? GridDomain::disk_polar
                                                  : GridDomain::hstar;
      grid.lo1 = config.grid_lo1;
      grid.hi1 = config.grid_hi1;
      grid.lo2 = config.grid_lo2;
      grid.hi2 = config.grid_hi2;
      grid.h = config.h;
      grid.n1 = config.grid_n1;
      grid.n2 = config.grid_n2;
      GridSpec fine = grid;
      fine.h = 0.5 * grid.h;
      ResidualStats coarse_stats, fine_stats;
      if (config.pde_equation == "disk") {
        coarse_stats = residual_disk(grid, 0.5, 0.5);
        fine_stats = residual_disk(fine, 0.5, 0.5);
      } else if (config.pde_equation == "hstar_h") {
        coarse_stats = residual_hstar_H(P, grid);
        fine_stats = residual_hstar_H(P, fine);
      } else if (config.pde_equation == "hstar_g4") {
        coarse_stats = residual_hstar_G_k4(grid);
        fine_stats = residual_hstar_G_k4(fine);
      } else {
        throw std::invalid_argument("unknown pde_equation: " +
                                    config.pde_equation);
      }
      const ConvergenceOrder order = convergence_order(coarse_stats, fine_stats);
      char region[128];
      std::snprintf(region, sizeof region, "%s[%g,%g]x[%g,%g]",
                    config.pde_equation.c_str(), grid.lo1, grid.hi1, grid.lo2,
                    grid.hi2);
      const std::string path = result_path("residuals.csv");
      CsvWriter csv(path, {"region", "h", "max_res", "mean_res", "order"});
      csv.row({region, fmt_num(coarse_stats.h), fmt_num(coarse_stats.max_res),
               fmt_num(coarse_stats.mean_res), ""});
      csv.row({region, fmt_num(fine_stats.h), fmt_num(fine_stats.max_res),
               fmt_num(fine_stats.mean_res),
               order.machine_zero ? "machine-zero" : fmt_num(order.order)});
      outputs.push_back(path);
    }
  } catch (const HeavyTailError& e) {
    diagnostics["heavy_tail_error"] = e.what();
    diagnostics["effective_sample_size"] = e.ess;
    status = kNumericalGuard;
  } catch (const std::invalid_argument& e) {
    manifest["error"] = e.what();
    status = kUsageError;
  } catch (const std::domain_error& e) {
    manifest["error"] = e.what();
    status = kUsageError;
  } catch (const std::exception& e) {
    manifest["error"] = e.what();
    status = kNumericalGuard;
  }

  const auto t_end = std::chrono::steady_clock::now();
  manifest["wall_time_s"] =
      std::chrono::duration<double>(t_end - t_start).count();
  manifest["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  manifest["diagnostics"] = diagnostics;
  manifest["outputs"] = outputs;
  manifest["exit_status"] = status;
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (!ec) {
    std::ofstream m(std::filesystem::path(config.out_dir) / "manifest.json");
    m << manifest.dump(2) << '\n';
  }
  return status;
}

}  // namespace rsle
