// rsle: radial SLE laboratory CLI.
//
// Subcommands map one-to-one onto RunConfig commands; a JSON config file can
// supply any value and explicit flags override it.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsle/runner.hpp"

namespace {

struct FlagValues {
  std::string config_path;
  std::vector<std::string> points;
};

int parse_point_list(const std::vector<std::string>& raw,
                     std::vector<std::array<double, 2>>* out) {
  out->clear();
  for (const auto& s : raw) {
    double x = 0.0, y = 0.0;
    if (std::sscanf(s.c_str(), "%lf,%lf", &x, &y) != 2) {
      std::fprintf(stderr, "bad --point '%s' (expected x,y)\n", s.c_str());
      return 1;
    }
    out->push_back({x, y});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsle: radial Schramm-Loewner evolution laboratory"};
  app.require_subcommand(1);

  FlagValues flags;
  rsle::RunConfig overrides;  // only fields whose flags were given are used

  static const char* kCommands[] = {
      "params",          "eval",         "simulate",
      "estimate-green",  "estimate-phi", "martingale-check",
      "stationary-test", "pde-check",    "scaling-fit"};
  static const char* kDescriptions[] = {
      "derive the scalar parameters for kappa",
      "evaluate the closed-form fields at points",
      "simulate and dump Loewner trajectories",
      "Monte Carlo Green's function, direct threshold route",
      "Monte Carlo Phi(z) = E*[exp(-beta T)] and H*Phi",
      "empirical means of the stopped local martingale",
      "KS test of the tilted angle process against its invariant density",
      "finite-difference residuals of the field equations",
      "fit the threshold-probability scaling exponent"};

  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    CLI::App* sub = app.add_subcommand(kCommands[i], kDescriptions[i]);
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--kappa", overrides.kappa, "SLE parameter in (0,8)");
    sub->add_option("--point", flags.points, "point as x,y (repeatable)");
    sub->add_option("--domain", overrides.point_domain,
                    "point domain: hstar|disk|half");
    sub->add_option("--flow", overrides.flow, "flow: radial|chordal");
    sub->add_option("--eps0", overrides.eps0, "coarsest ladder threshold");
    sub->add_option("--octaves", overrides.octaves, "ladder depth in octaves");
    sub->add_option("--n", overrides.n, "replica count / sample count");
    sub->add_option("--dt", overrides.dt, "base time step");
    sub->add_option("--seed", overrides.seed, "64-bit seed");
    sub->add_option("--horizon", overrides.horizon,
                    "simulation horizon (0 = auto)");
    sub->add_option("--out", overrides.out_dir, "output directory");
    sub->add_option("--threads", overrides.threads,
                    "worker threads (0 = RSLE_THREADS or hardware)");
    sub->add_option("--delta-stop", overrides.delta_stop,
                    "tilted-flow kill radius");
    sub->add_flag("--via-phi", overrides.via_phi,
                  "also estimate H*Phi (estimate-green)");
    sub->add_option("--kind", overrides.martingale_kind,
                    "martingale kind: radial_N|chordal_M");
    sub->add_option("--t-grid", overrides.t_grid, "martingale time grid");
    sub->add_option("--chains", overrides.chains, "stationary-test chains");
    sub->add_option("--burn-in", overrides.burn_in, "stationary burn-in time");
    sub->add_option("--thin", overrides.thin, "stationary thinning interval");
    sub->add_option("--theta-dt", overrides.theta_dt, "angle process step");
    sub->add_option("--ks-threshold", overrides.ks_threshold,
                    "stationary-test pass threshold");
    sub->add_option("--equation", overrides.pde_equation,
                    "pde-check equation: disk|hstar_h|hstar_g4");
    sub->add_option("--stencil", overrides.h, "pde-check stencil width");
    sub->add_option("--grid", "grid as lo1,hi1,lo2,hi2")
        ->each([&overrides](const std::string& s) {
          if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &overrides.grid_lo1,
                          &overrides.grid_hi1, &overrides.grid_lo2,
                          &overrides.grid_hi2) != 4)
            throw CLI::ValidationError("--grid expects lo1,hi1,lo2,hi2");
        });
    sub->add_option("--stride", overrides.record_stride,
                    "trajectory record stride (simulate)");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  rsle::RunConfig config;
  if (active->count("--config")) {
    try {
      config = rsle::load_config_file(flags.config_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return rsle::kUsageError;
    }
  }
  config.command = active->get_name();

  auto take = [&](const char* flag, auto member) {
    if (active->count(flag)) config.*member = overrides.*member;
  };
  take("--kappa", &rsle::RunConfig::kappa);
  take("--domain", &rsle::RunConfig::point_domain);
  take("--flow", &rsle::RunConfig::flow);
  take("--eps0", &rsle::RunConfig::eps0);
  take("--octaves", &rsle::RunConfig::octaves);
  take("--n", &rsle::RunConfig::n);
  take("--dt", &rsle::RunConfig::dt);
  take("--seed", &rsle::RunConfig::seed);
  take("--horizon", &rsle::RunConfig::horizon);
  take("--out", &rsle::RunConfig::out_dir);
  take("--threads", &rsle::RunConfig::threads);
  take("--delta-stop", &rsle::RunConfig::delta_stop);
  take("--via-phi", &rsle::RunConfig::via_phi);
  take("--kind", &rsle::RunConfig::martingale_kind);
  take("--t-grid", &rsle::RunConfig::t_grid);
  take("--chains", &rsle::RunConfig::chains);
  take("--burn-in", &rsle::RunConfig::burn_in);
  take("--thin", &rsle::RunConfig::thin);
  take("--theta-dt", &rsle::RunConfig::theta_dt);
  take("--ks-threshold", &rsle::RunConfig::ks_threshold);
  take("--equation", &rsle::RunConfig::pde_equation);
  take("--stencil", &rsle::RunConfig::h);
  take("--stride", &rsle::RunConfig::record_stride);
  if (active->count("--grid")) {
    config.grid_lo1 = overrides.grid_lo1;
    config.grid_hi1 = overrides.grid_hi1;
    config.grid_lo2 = overrides.grid_lo2;
    config.grid_hi2 = overrides.grid_hi2;
  }
  if (active->count("--point")) {
    if (parse_point_list(flags.points, &config.points)) return rsle::kUsageError;
  }

  const int status = rsle::run(config);
  if (status != rsle::kOk)
    std::fprintf(stderr, "rsle: exited with status %d (see manifest.json)\n",
                 status);
  return status;
}
