// d2dhop: coverage, rates, validation, optimization and sweeps for D2D
// hopping scenarios.
//
// Exit status: 0 success, 1 validation outside tolerance, 2 invalid
// configuration, 3 numerical failure, 4 other error.

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <iostream>

#include "d2dhop/experiment.hpp"
#include "d2dhop/version.hpp"

using namespace d2dhop;

namespace {

struct Common {
  std::string scenario;
  std::string mode;
  std::string output;
  std::string format;
  unsigned workers = 0;
};

void add_common(CLI::App* app, Common& c, bool with_format) {
  app->add_option("scenario", c.scenario, "Scenario file or preset name")->required();
  app->add_option("--mode", c.mode, "Allocation mode override")->check(CLI::IsMember({"dedicated", "shared"}));
  app->add_option("-o,--output", c.output, "Output file (default: stdout)");
  if (with_format) app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"record", "json"}));
  app->add_option("--workers", c.workers, "Worker threads (default: D2DHOP_WORKERS or all cores)");
}

ExperimentSpec base_spec(const Common& c, Task task) {
  ExperimentSpec s;
  s.scenario = io::load_scenario(c.scenario);
  s.scenario_name = c.scenario;
  s.task = task;
  if (!c.mode.empty()) s.mode = io::parse_mode(c.mode);
  s.output = c.output;
  if (!c.format.empty()) s.format = parse_format(c.format);
  s.workers = c.workers;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic, simulated and optimized rates of D2D links with time and frequency hopping"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string spec_file;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment spec file");
  run_cmd->add_option("spec", spec_file, "Experiment YAML file")->required();

  Common val;
  std::size_t val_reps = 10000;
  std::uint64_t val_seed = 1;
  double val_tol = 0.015;
  double beta_from = -20.0, beta_to = 40.0;
  std::size_t beta_points = 40;
  auto* validate = app.add_subcommand("validate", "Analytic vs Monte Carlo coverage, with a pass/fail summary");
  add_common(validate, val, false);
  validate->add_option("--replications", val_reps, "Monte Carlo replications")->capture_default_str();
  validate->add_option("--seed", val_seed, "Base seed")->capture_default_str();
  validate->add_option("--tol", val_tol, "Max allowed |analytic - empirical|")->capture_default_str();
  validate->add_option("--from-db", beta_from, "Lowest threshold, dB")->capture_default_str();
  validate->add_option("--to-db", beta_to, "Highest threshold, dB")->capture_default_str();
  validate->add_option("--points", beta_points, "Threshold grid points")->capture_default_str();

  Common cov;
  std::size_t cov_reps = 0;
  std::uint64_t cov_seed = 1;
  std::string cov_class = "both";
  auto* coverage = app.add_subcommand("coverage", "Coverage curves P(SINR > beta)");
  add_common(coverage, cov, false);
  coverage->add_option("--from-db", beta_from, "Lowest threshold, dB")->capture_default_str();
  coverage->add_option("--to-db", beta_to, "Highest threshold, dB")->capture_default_str();
  coverage->add_option("--points", beta_points, "Threshold grid points")->capture_default_str();
  coverage->add_option("--link-class", cov_class)->check(CLI::IsMember({"d2d", "cellular", "both"}))->capture_default_str();
  coverage->add_option("--replications", cov_reps, "Also simulate with this many replications");
  coverage->add_option("--seed", cov_seed, "Base seed")->capture_default_str();

  Common rat;
  std::size_t rat_reps = 0;
  std::uint64_t rat_seed = 1;
  auto* rates_cmd = app.add_subcommand("rates", "Average rates, lower bounds and rate density");
  add_common(rates_cmd, rat, true);
  rates_cmd->add_option("--replications", rat_reps, "Also simulate with this many replications");
  rates_cmd->add_option("--seed", rat_seed, "Base seed")->capture_default_str();

  Common opt;
  std::size_t resolution = 51;
  auto* optimize = app.add_subcommand("optimize", "Optimal hopping probabilities and spectrum split");
  add_common(optimize, opt, true);
  optimize->add_option("--resolution", resolution, "Grid points per type (shared mode)")->capture_default_str();

  Common swp;
  std::string var;
  double from = 0.0, to = 0.0, step = 0.0;
  std::size_t swp_reps = 0;
  std::uint64_t swp_seed = 1;
  auto* sweep = app.add_subcommand("sweep", "Vary one field and tabulate rates and the objective");
  add_common(sweep, swp, false);
  sweep->add_option("--var", var, "Field: theta, w, density, lambda_d, lambda_u, p_t, p_f, p_t[i], ...")->required();
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--step", step)->required();
  sweep->add_option("--replications", swp_reps, "Also simulate rates with this many replications");
  sweep->add_option("--seed", swp_seed, "Base seed")->capture_default_str();

  Common snap;
  std::uint64_t snap_seed = 1;
  double window = 0.0;
  auto* snapshot = app.add_subcommand("snapshot", "One sampled deployment as a point list");
  add_common(snapshot, snap, false);
  snapshot->add_option("--seed", snap_seed)->capture_default_str();
  snapshot->add_option("--window", window, "Window side, m (default 20/sqrt(lambda_b))");

  auto* list = app.add_subcommand("presets", "List bundled scenario presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : presets::names()) std::cout << n << '\n';
      return 0;
    }
    ExperimentSpec s;
    if (run_cmd->parsed()) {
      s = load_spec(spec_file);
    } else if (validate->parsed()) {
      s = base_spec(val, Task::Validate);
      s.replications = val_reps;
      s.seed = val_seed;
      s.tolerance = val_tol;
    } else if (coverage->parsed()) {
      s = base_spec(cov, Task::Coverage);
      s.simulate = cov_reps > 0;
      s.replications = cov_reps;
      s.seed = cov_seed;
      if (cov_class == "d2d") s.classes = {LinkClass::D2D};
      if (cov_class == "cellular") s.classes = {LinkClass::Cellular};
    } else if (rates_cmd->parsed()) {
      s = base_spec(rat, Task::Rates);
      s.simulate = rat_reps > 0;
      s.replications = rat_reps;
      s.seed = rat_seed;
    } else if (optimize->parsed()) {
      s = base_spec(opt, Task::Optimize);
      s.resolution = resolution;
    } else if (sweep->parsed()) {
      s = base_spec(swp, Task::Sweep);
      s.sweep_var = var;
      s.sweep_grid = linear_grid(from, to, step);
      s.simulate = swp_reps > 0;
      s.replications = swp_reps;
      s.seed = swp_seed;
    } else if (snapshot->parsed()) {
      s = base_spec(snap, Task::Snapshot);
      s.seed = snap_seed;
      s.window = window;
    }
    if (validate->parsed() || coverage->parsed()) {
      s.beta_from_db = beta_from;
      s.beta_to_db = beta_to;
      s.beta_points = beta_points;
    }
    return run(s).exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const YAML::Exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
