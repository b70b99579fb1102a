// Command-line front end: single-copy trajectories, coupled-distance curves,
// parameter sweeps, closed-form rate checks, and a build selftest.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "andersen/errors.hpp"
#include "andersen/metrics.hpp"
#include "andersen/run_config.hpp"
#include "andersen/selftest.hpp"

namespace {

using andersen::ConfigError;
using andersen::ConfigMap;
using andersen::RunConfig;

struct ConfigCli {
  std::string config_path;
  ConfigMap overrides;
};

// Every config key doubles as a long flag (--space.kind torus); flags win
// over the config file.
void add_config_options(CLI::App* cmd, ConfigCli& cli) {
  cmd->add_option("--config", cli.config_path, "config file (flat key = value, or a meta sidecar)");
  for (const auto& key : RunConfig::known_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&cli, key](const std::string& v) { cli.overrides[key] = v; });
  }
}

RunConfig resolve_config(const ConfigCli& cli) {
  ConfigMap map;
  if (!cli.config_path.empty()) map = andersen::load_config_file(cli.config_path);
  for (const auto& [k, v] : cli.overrides) map[k] = v;
  return RunConfig::from_map(map);
}

void write_output(const RunConfig& cfg, const std::string& csv) {
  if (cfg.out_csv.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(cfg.out_csv, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + cfg.out_csv);
    out << csv;
  }
  if (!cfg.out_meta.empty()) {
    std::ofstream meta(cfg.out_meta, std::ios::binary);
    if (!meta) throw ConfigError("cannot write " + cfg.out_meta);
    meta << andersen::meta_json(cfg);
  }
}

int run_simulate(const ConfigCli& cli) {
  RunConfig cfg = resolve_config(cli);
  andersen::SpaceSpec space = cfg.make_space();
  auto potential = cfg.make_potential(space);
  andersen::AndersenConfig acfg = cfg.make_andersen();
  std::vector<double> grid = andersen::make_grid(cfg.t_end, cfg.record_dt);
  andersen::PhasePoint y0 = cfg.make_initial_point(space);
  andersen::Rng rng = andersen::Rng::stream(cfg.seed, 0, 0);
  auto states = andersen::simulate_andersen(std::move(y0), space, *potential, acfg, grid, rng);
  write_output(cfg, andersen::trajectory_csv(grid, states));
  return 0;
}

int run_couple(const ConfigCli& cli) {
  RunConfig cfg = resolve_config(cli);
  andersen::ExperimentSpec spec = cfg.make_experiment();
  auto potential = cfg.make_potential(spec.space);
  andersen::EstimateSeries series = andersen::estimate_rho_curve(spec, *potential);
  write_output(cfg, andersen::series_csv(series));
  try {
    andersen::DecayFit fit =
        andersen::fit_decay_rate(series, cfg.resolve_fit_t0(), cfg.resolve_fit_t1());
    std::cerr << "fitted decay rate " << fit.rate << " (r^2 " << fit.r_squared << ", "
              << fit.points << " points)\n";
  } catch (const andersen::FitDomainError&) {
    // fine: the curve may be flat at zero or the window too narrow
  }
  return 0;
}

int run_sweep(const ConfigCli& cli) {
  RunConfig cfg = resolve_config(cli);
  andersen::ExperimentSpec base = cfg.make_experiment();
  auto rows =
      andersen::sweep(cfg.resolve_sweep_axis(), cfg.resolve_sweep_values(), base,
                      cfg.potential_factory(), cfg.resolve_sweep_at_time(), cfg.resolve_fit_t0(),
                      cfg.resolve_fit_t1());
  write_output(cfg, andersen::sweep_csv(rows));
  return 0;
}

struct CheckArgs {
  double beta = 1.0;
  double lambda = 0.0;
  double lambda_per_m = 0.0;
  std::size_t m = 1;
  double ell = 0.0;
  double L = 0.0;
  double J = 0.0;
  double sigma_max = 0.0;
  double l_g = 0.0;
};

int run_check(const CheckArgs& a) {
  double lambda = a.lambda;
  if (a.lambda_per_m > 0.0) {
    if (lambda > 0.0) throw ConfigError("give either --lambda or --lambda-per-m, not both");
    lambda = a.lambda_per_m * static_cast<double>(a.m);
  }
  if (!(lambda > 0.0)) throw ConfigError("check needs --lambda or --lambda-per-m");
  nlohmann::json j;
  if (a.sigma_max > 0.0) {
    if (a.ell > 0.0) throw ConfigError("--sigma-max (Euclidean) and --ell (torus) are exclusive");
    andersen::WahRate r = andersen::wah_rate(lambda, static_cast<double>(a.m), a.sigma_max, a.l_g);
    j["kind"] = "euclidean";
    j["lambda"] = lambda;
    j["m"] = a.m;
    j["sigma_max"] = a.sigma_max;
    j["l_g"] = a.l_g;
    j["c"] = r.c;
    j["condition_ok"] = r.condition_ok;
    j["kappa_g"] = r.kappa_g;
  } else {
    if (!(a.ell > 0.0)) throw ConfigError("check needs --ell (torus) or --sigma-max (Euclidean)");
    andersen::TorusMetricParams p =
        andersen::torus_params(a.beta, lambda, a.m, a.ell, a.L, a.J);
    j["kind"] = "torus";
    j["beta"] = a.beta;
    j["lambda"] = lambda;
    j["m"] = a.m;
    j["ell"] = a.ell;
    j["L"] = a.L;
    j["J"] = a.J;
    j["R"] = p.R;
    j["gamma"] = p.gamma;
    j["a"] = p.a;
    j["alpha"] = p.alpha;
    j["c_A"] = p.c_A;
    j["cond_lambda_ok"] = p.cond_lambda_ok;
    j["cond_j_ok"] = p.cond_j_ok;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for Hamiltonian dynamics with random velocity refreshments"};
  app.require_subcommand(1);

  ConfigCli sim_cli, couple_cli, sweep_cli;
  CheckArgs check_args;

  CLI::App* sim = app.add_subcommand("simulate", "single-copy trajectory, CSV per record time");
  add_config_options(sim, sim_cli);
  CLI::App* couple =
      app.add_subcommand("couple", "coupled-pair distance curve over replicas, CSV t,mean,stderr,count");
  add_config_options(couple, couple_cli);
  CLI::App* sweep = app.add_subcommand("sweep", "repeat the coupling experiment along one axis");
  add_config_options(sweep, sweep_cli);

  CLI::App* check = app.add_subcommand("check", "closed-form contraction rates and conditions, JSON");
  check->add_option("--beta", check_args.beta, "inverse temperature");
  check->add_option("--lambda", check_args.lambda, "total refreshment rate");
  check->add_option("--lambda-per-m", check_args.lambda_per_m, "refreshment rate per particle");
  check->add_option("--m", check_args.m, "particle count");
  check->add_option("--ell", check_args.ell, "torus circumference (selects the torus rate)");
  check->add_option("--L", check_args.L, "bound on |d2U/dxi2|");
  check->add_option("--J", check_args.J, "bound on |d2U/dxidxj|, i != j");
  check->add_option("--sigma-max", check_args.sigma_max,
                    "sqrt of the largest eigenvalue of C (selects the Euclidean rate)");
  check->add_option("--l-g", check_args.l_g, "Lipschitz bound for the convex perturbation's gradient");

  CLI::App* self = app.add_subcommand("selftest", "run built-in invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n(run with --help for usage)\n";
    return 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_cli);
    if (couple->parsed()) return run_couple(couple_cli);
    if (sweep->parsed()) return run_sweep(sweep_cli);
    if (check->parsed()) return run_check(check_args);
    if (self->parsed()) return andersen::selftest(std::cout) ? 0 : 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
