#pragma once

// Batch experiments: one ExperimentSpec names a scenario, a task and its
// grid, and where the plot-ready output goes.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "d2dhop/coverage.hpp"
#include "d2dhop/io/output.hpp"
#include "d2dhop/io/scenario.hpp"
#include "d2dhop/optimizer.hpp"
#include "d2dhop/rates.hpp"
#include "d2dhop/sim/empirical.hpp"

namespace d2dhop {

enum class Task { Coverage, Rates, Validate, Optimize, Sweep, Snapshot };
enum class Format { Csv, Record, Json };

inline Task parse_task(const std::string& s) {
  if (s == "coverage") return Task::Coverage;
  if (s == "rates") return Task::Rates;
  if (s == "validate") return Task::Validate;
  if (s == "optimize") return Task::Optimize;
  if (s == "sweep") return Task::Sweep;
  if (s == "snapshot") return Task::Snapshot;
  throw ConfigError("task", "expected coverage, rates, validate, optimize, sweep or snapshot");
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "record") return Format::Record;
  if (s == "json") return Format::Json;
  throw ConfigError("format", "expected csv, record or json");
}

/// from, from+step, ..., to (inclusive within half a step). Values are
/// rounded to 12 significant digits so 0.02·35 prints as 0.7.
inline std::vector<double> linear_grid(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("sweep.step", "must be > 0");
  if (!(to >= from)) throw ConfigError("sweep.to", "must be >= sweep.from");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 0.5)) + 1;
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", from + static_cast<double>(k) * step);
    g[k] = std::strtod(buf, nullptr);
  }
  return g;
}

struct ExperimentSpec {
  NetworkConfig scenario;
  std::string scenario_name;
  Task task = Task::Validate;
  std::optional<Mode> mode;  // default: the scenario's own
  std::vector<LinkClass> classes{LinkClass::D2D, LinkClass::Cellular};
  double beta_from_db = -20.0, beta_to_db = 40.0;
  std::size_t beta_points = 40;
  std::string sweep_var;
  std::vector<double> sweep_grid;
  std::size_t replications = 10000;
  bool simulate = false;  // coverage / rates / sweep: also run the simulator
  std::uint64_t seed = 1;
  double tolerance = 0.015;
  std::size_t resolution = 51;  // shared-mode optimizer grid
  double window = 0.0;          // snapshot window, 0: default
  std::string output;           // empty: stdout
  std::optional<Format> format;
  unsigned workers = 0;  // 0: D2DHOP_WORKERS or hardware concurrency

  Mode effective_mode() const { return mode.value_or(scenario.mode); }

  bool simulates() const { return task == Task::Validate || (simulate && task != Task::Optimize); }

  void validate() const {
    scenario.validate();
    if (task == Task::Sweep) {
      if (sweep_var.empty()) throw ConfigError("sweep.var", "required for the sweep task");
      if (sweep_grid.empty()) throw ConfigError("sweep", "grid is empty");
      for (std::size_t i = 1; i < sweep_grid.size(); ++i)
        if (!(sweep_grid[i] > sweep_grid[i - 1])) throw ConfigError("sweep", "grid must be strictly increasing");
    }
    if (simulates() && replications < 1) throw ConfigError("replications", "must be >= 1 for simulation tasks");
    if (beta_points < 1) throw ConfigError("beta_db.points", "must be >= 1");
    if (!(beta_to_db >= beta_from_db)) throw ConfigError("beta_db.to", "must be >= beta_db.from");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be > 0");
    if (resolution < 2) throw ConfigError("resolution", "must be >= 2");
  }
};

/// Applies one sweep value. `density` scales λ_U and every λ_Dj together so
/// the total D2D density equals the value (the λ_D/λ_U ratio is kept).
inline void apply_sweep_value(NetworkConfig& c, const NetworkConfig& base, const std::string& var, double v) {
  auto per_type = [&](const std::string& name, double D2DTypeConfig::*field) {
    if (var == name) {
      for (auto& t : c.d2d_types) t.*field = v;
      return true;
    }
    const auto pre = name + "[";
    if (var.rfind(pre, 0) == 0 && var.back() == ']') {
      std::size_t i = 0;
      try {
        i = std::stoul(var.substr(pre.size(), var.size() - pre.size() - 1));
      } catch (const std::exception&) {
        throw ConfigError("sweep.var", "bad type index in '" + var + "'");
      }
      if (i >= c.num_types()) throw ConfigError("sweep.var", "type index out of range in '" + var + "'");
      c.d2d_types[i].*field = v;
      return true;
    }
    return false;
  };
  const double total = base.total_d2d_density();
  if (var == "theta") c.theta = v;
  else if (var == "w") c.w = v;
  else if (var == "alpha") c.alpha = v;
  else if (var == "delta") c.delta = v;
  else if (var == "mean_distance_m") c.delta = delta_from_mean_distance(v);
  else if (var == "lambda_b") c.lambda_b = v;
  else if (var == "lambda_u") c.lambda_u = v;
  else if (var == "b_c") c.b_c = v;
  else if (var == "p_b_dbm") c.p_b = dbm_to_watts(v);
  else if (var == "p_d_dbm") c.p_d = dbm_to_watts(v);
  else if (var == "noise_dbm") c.noise = dbm_to_watts(v);
  else if (var == "lambda_d" || var == "density") {
    if (!(total > 0.0)) throw ConfigError("sweep.var", var + " sweep needs a scenario with nonzero D2D density");
    const double k = v / total;
    for (std::size_t j = 0; j < c.num_types(); ++j) c.d2d_types[j].lambda_d = base.d2d_types[j].lambda_d * k;
    if (var == "density") c.lambda_u = base.lambda_u * k;
  } else if (!per_type("p_t", &D2DTypeConfig::p_t) && !per_type("p_f", &D2DTypeConfig::p_f) &&
             !per_type("lambda_d", &D2DTypeConfig::lambda_d) && !per_type("b_d", &D2DTypeConfig::b_d)) {
    throw ConfigError("sweep.var", "unknown sweep variable '" + var + "'");
  }
}

struct RunResult {
  int exit_code = 0;
  std::optional<double> max_deviation;  // validate only
  bool passed = true;
};

namespace detail {

inline std::vector<CoverageCurve> analytic_curves(const ExperimentSpec& s, const NetworkConfig& c,
                                                  const std::vector<double>& betas, unsigned workers) {
  std::vector<CoverageCurve> out;
  for (auto cls : s.classes) out.push_back(coverage_curve(c, cls, betas, workers));
  return out;
}

inline std::vector<sim::EmpiricalCcdf> empirical_curves(const ExperimentSpec& s, const NetworkConfig& c,
                                                        const std::vector<double>& betas, unsigned workers) {
  sim::EmpiricalOptions opt;
  opt.workers = workers;
  std::vector<sim::EmpiricalCcdf> out;
  for (auto cls : s.classes)
    out.push_back(sim::empirical_coverage(c, c.mode, cls, betas, s.replications, s.seed, opt));
  return out;
}

inline void run_sweep(const ExperimentSpec& s, const NetworkConfig& base, std::ostream& os, unsigned workers) {
  const Mode mode = base.mode;
  const bool theta_objective_mode = s.sweep_var == "theta" && mode == Mode::Dedicated;
  std::optional<std::pair<double, double>> betas;
  if (theta_objective_mode) betas = incumbent_thresholds(base);

  std::vector<std::string> cols = {"var",         "value",         "mode",
                                   "rate_cellular", "rate_d2d_mixture", "lb_cellular",
                                   "lb_d2d_mixture", "total_rate_per_cell_bps", "rate_density",
                                   "objective",   "p_t_star"};
  if (s.simulate)
    cols = io::concat(cols, {"sim_rate_cellular", "sim_rate_d2d_mixture", "sim_total_rate_per_cell_bps",
                             "replications", "seed"});
  io::CsvWriter w(os, io::concat(cols, io::parameter_columns()),
                  s.simulate ? std::optional<std::uint64_t>(s.seed) : std::nullopt,
                  {"sweep " + s.sweep_var + "; objective = " +
                   (theta_objective_mode ? std::string("dedicated theta objective; every row uses p_t = 1, p_f = p_f*(theta); beta fixed at the incumbent theta")
                                         : std::string("rate_density"))});

  // Points are evaluated in parallel and written in grid order.
  const std::size_t n = s.sweep_grid.size();
  std::vector<std::vector<std::string>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        try {
          const double v = s.sweep_grid[i];
          auto c = base;
          apply_sweep_value(c, base, s.sweep_var, v);
          if (theta_objective_mode) c = at_theta(c, v);
          // θ = 1 leaves no cellular spectrum; only the objective is defined there.
          bool rates_defined = true;
          try {
            c.validate();
          } catch (const ConfigError& e) {
            if (!(theta_objective_mode && v == 1.0 && e.field() == "theta"))
              throw ConfigError("sweep[" + s.sweep_var + "=" + io::fmt(v) + "]." + e.field(),
                                std::string(e.what()).substr(e.field().size() + 2));
            rates_defined = false;
          }
          std::vector<std::string> r = {s.sweep_var, io::fmt(v), to_string(mode)};
          std::string density, objective, pts;
          if (rates_defined) {
            const auto rep = rate_report(evaluator_for(c, mode));
            r = io::concat(r, {io::fmt(rep.rate_cellular), io::fmt(rep.rate_d2d_mixture), io::fmt(rep.lb_cellular),
                               io::fmt(rep.lb_d2d_mixture), io::fmt(total_rate_per_cell(c, rep))});
            density = io::fmt(rate_density(c, mode));
          } else {
            r = io::concat(r, {"", "", "", "", ""});
          }
          objective = theta_objective_mode ? io::fmt(theta_objective(c, v, betas->first, betas->second)) : density;
          if (s.sweep_var == "w") pts = io::join(optimal_time_hopping(c, mode, 0.05, 1u << 22, 1).p_t);
          r = io::concat(r, {density, objective, pts});
          if (s.simulate) {
            if (rates_defined) {
              sim::EmpiricalOptions opt;
              opt.workers = 1;
              const auto e = sim::empirical_rates(c, mode, s.replications, s.seed, opt);
              r = io::concat(r, {io::fmt(e.rate_cellular), io::fmt(e.rate_d2d_mixture),
                                 io::fmt(total_rate_per_cell(c, e.rate_cellular, e.rate_d2d_per_type))});
            } else {
              r = io::concat(r, {"", "", ""});
            }
            r = io::concat(r, {io::fmt(std::uint64_t(s.replications)), io::fmt(s.seed)});
          }
          rows[i] = io::concat(r, io::parameter_values(c));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      },
      workers);
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& r : rows) w.row(r);
}

}  // namespace detail

/// Runs the experiment, writing data to `out` and a one-line summary to `log`.
inline RunResult run_into(const ExperimentSpec& spec, std::ostream& out, std::ostream& log) {
  spec.validate();
  const unsigned workers = spec.workers ? spec.workers : worker_count();
  const auto cfg = spec.scenario.with_mode(spec.effective_mode());
  const auto betas = db_grid(spec.beta_from_db, spec.beta_to_db, spec.beta_points);
  const auto fmt = spec.format;
  auto require_format = [&](std::initializer_list<Format> ok, Format dflt) {
    const Format f = fmt.value_or(dflt);
    for (auto o : ok)
      if (o == f) return f;
    throw ConfigError("format", "not supported for this task");
  };
  RunResult res;
  switch (spec.task) {
    case Task::Coverage: {
      require_format({Format::Csv}, Format::Csv);
      const auto a = detail::analytic_curves(spec, cfg, betas, workers);
      if (spec.simulate) io::write_empirical_csv(out, cfg, detail::empirical_curves(spec, cfg, betas, workers), &a);
      else io::write_curve_csv(out, cfg, a);
      break;
    }
    case Task::Validate: {
      require_format({Format::Csv}, Format::Csv);
      const auto a = detail::analytic_curves(spec, cfg, betas, workers);
      const auto e = detail::empirical_curves(spec, cfg, betas, workers);
      io::write_empirical_csv(out, cfg, e, &a);
      double dev = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < betas.size(); ++i) dev = std::max(dev, std::abs(a[k].ccdf[i] - e[k].value(i)));
      res.max_deviation = dev;
      res.passed = dev <= spec.tolerance;
      res.exit_code = res.passed ? 0 : 1;
      log << "validate " << spec.scenario_name << " (" << to_string(cfg.mode) << ", " << spec.replications
          << " replications, seed " << spec.seed << "): max |analytic - empirical| = " << io::fmt(dev) << " over "
          << betas.size() * a.size() << " points, tolerance " << io::fmt(spec.tolerance) << ": "
          << (res.passed ? "PASS" : "FAIL") << '\n';
      break;
    }
    case Task::Rates: {
      const Format f = require_format({Format::Record, Format::Json}, Format::Record);
      const auto r = rate_report(evaluator_for(cfg, cfg.mode));
      std::optional<sim::EmpiricalRates> e;
      if (spec.simulate) {
        sim::EmpiricalOptions opt;
        opt.workers = workers;
        e = sim::empirical_rates(cfg, cfg.mode, spec.replications, spec.seed, opt);
      }
      if (f == Format::Json) {
        auto j = io::to_json(cfg, r);
        j["rate_density"] = rate_density(cfg, cfg.mode);
        if (e)
          j["simulated"] = {{"rate_cellular", e->rate_cellular},
                            {"rate_d2d_per_type", e->rate_d2d_per_type},
                            {"rate_d2d_mixture", e->rate_d2d_mixture},
                            {"se_cellular", e->se_cellular},
                            {"se_d2d", e->se_d2d},
                            {"se_cellular_stderr", e->se_cellular_stderr},
                            {"se_d2d_stderr", e->se_d2d_stderr},
                            {"total_rate_per_cell_bps", total_rate_per_cell(cfg, e->rate_cellular, e->rate_d2d_per_type)},
                            {"replications", e->replications},
                            {"seed", e->seed}};
        out << j.dump(2) << '\n';
      } else {
        io::write_record(out, cfg, r);
        io::Record rec(out);
        rec("rate_density", rate_density(cfg, cfg.mode));
        if (e)
          rec("sim_rate_cellular", e->rate_cellular)("sim_rate_d2d_per_type", io::join(e->rate_d2d_per_type))(
              "sim_rate_d2d_mixture", e->rate_d2d_mixture)("sim_se_cellular", e->se_cellular)("sim_se_d2d", e->se_d2d)(
              "sim_total_rate_per_cell_bps", total_rate_per_cell(cfg, e->rate_cellular, e->rate_d2d_per_type))(
              "replications", io::fmt(std::uint64_t(e->replications)))("seed", io::fmt(e->seed));
      }
      break;
    }
    case Task::Optimize: {
      const Format f = require_format({Format::Record, Format::Json}, Format::Record);
      const auto t = optimal_time_hopping(cfg, cfg.mode, 0.05, 1u << 22, workers);
      const auto s = cfg.mode == Mode::Dedicated ? optimal_theta(cfg, workers)
                                                 : optimize_shared(cfg, spec.resolution, 1u << 20, workers);
      if (f == Format::Json) {
        auto j = io::to_json(s);
        j["mode"] = to_string(cfg.mode);
        j["scenario"] = io::to_json(cfg);
        j["time_hopping"] = {{"p_t", t.p_t}, {"method", to_string(t.method)}, {"heavy_load", t.heavy_load}};
        out << j.dump(2) << '\n';
      } else {
        io::Record rec(out);
        rec("mode", to_string(cfg.mode));
        for (std::size_t i = 0; i < io::parameter_columns().size(); ++i)
          rec(io::parameter_columns()[i], io::parameter_values(cfg)[i]);
        rec("time_hopping.p_t", io::join(t.p_t))("time_hopping.method", to_string(t.method));
        io::write_record(out, s);
      }
      log << "optimize " << spec.scenario_name << " (" << to_string(cfg.mode) << "): " << to_string(s.method)
          << ", theta* = " << io::fmt(s.theta_star) << ", p_f* = " << io::join(s.p_f_star)
          << ", objective = " << io::fmt(s.objective) << '\n';
      break;
    }
    case Task::Sweep:
      require_format({Format::Csv}, Format::Csv);
      detail::run_sweep(spec, cfg, out, workers);
      break;
    case Task::Snapshot: {
      require_format({Format::Csv}, Format::Csv);
      sim::SamplingOptions opt;
      opt.window = spec.window;
      io::write_deployment_csv(out, sim::sample_deployment(cfg, spec.seed, opt));
      break;
    }
  }
  return res;
}

/// Runs with output to spec.output (or `fallback` when empty).
inline RunResult run(const ExperimentSpec& spec, std::ostream& fallback = std::cout, std::ostream& log = std::cerr) {
  if (spec.output.empty()) return run_into(spec, fallback, log);
  // Write fully before touching the destination so a failed run leaves no partial file.
  std::ostringstream buf;
  const auto r = run_into(spec, buf, log);
  const std::filesystem::path p(spec.output);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + spec.output);
  f << buf.str();
  return r;
}

/// Parses a YAML experiment file. Relative scenario paths resolve
/// against the file's directory; the output path is taken as given.
inline ExperimentSpec spec_from_yaml(const YAML::Node& n, const std::filesystem::path& base_dir = {}) {
  if (!n.IsMap()) throw ConfigError("spec", "expected a mapping at the top level");
  ExperimentSpec s;
  auto str = [](const YAML::Node& v, const std::string& f) {
    if (!v.IsScalar()) throw ConfigError(f, "expected a string");
    return v.Scalar();
  };
  auto num = [](const YAML::Node& v, const std::string& f) { return io::detail::number(v, f); };
  auto count = [&](const YAML::Node& v, const std::string& f) {
    const double x = num(v, f);
    if (!(x >= 0.0) || x != std::floor(x)) throw ConfigError(f, "expected a non-negative integer");
    return static_cast<std::size_t>(x);
  };
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path q(p);
    return q.is_relative() && !base_dir.empty() ? (base_dir / q).string() : p;
  };
  bool have_scenario = false;
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    const auto& v = kv.second;
    if (k == "scenario") {
      if (v.IsMap()) {
        s.scenario = io::scenario_from_yaml(v);
        s.scenario_name = "inline";
      } else {
        const auto ref = str(v, k);
        bool preset = false;
        for (const auto& name : presets::names()) preset |= name == ref;
        s.scenario = io::load_scenario(preset ? ref : resolve(ref));
        s.scenario_name = ref;
      }
      have_scenario = true;
    } else if (k == "task") s.task = parse_task(str(v, k));
    else if (k == "mode") s.mode = io::parse_mode(str(v, k));
    else if (k == "link_class") {
      const auto c = str(v, k);
      if (c == "d2d") s.classes = {LinkClass::D2D};
      else if (c == "cellular") s.classes = {LinkClass::Cellular};
      else if (c == "both") s.classes = {LinkClass::D2D, LinkClass::Cellular};
      else throw ConfigError(k, "expected d2d, cellular or both");
    } else if (k == "beta_db") {
      if (!v.IsMap()) throw ConfigError(k, "expected {from, to, points}");
      for (const auto& b : v) {
        const auto bk = b.first.as<std::string>();
        if (bk == "from") s.beta_from_db = num(b.second, k + ".from");
        else if (bk == "to") s.beta_to_db = num(b.second, k + ".to");
        else if (bk == "points") s.beta_points = count(b.second, k + ".points");
        else throw ConfigError(k + "." + bk, "unknown key");
      }
    } else if (k == "sweep") {
      if (!v.IsMap()) throw ConfigError(k, "expected {var, from, to, step} or {var, values}");
      std::optional<double> from, to, step;
      for (const auto& b : v) {
        const auto bk = b.first.as<std::string>();
        if (bk == "var") s.sweep_var = str(b.second, k + ".var");
        else if (bk == "from") from = num(b.second, k + ".from");
        else if (bk == "to") to = num(b.second, k + ".to");
        else if (bk == "step") step = num(b.second, k + ".step");
        else if (bk == "values") {
          if (!b.second.IsSequence()) throw ConfigError(k + ".values", "expected a list");
          for (std::size_t i = 0; i < b.second.size(); ++i)
            s.sweep_grid.push_back(num(b.second[i], k + ".values[" + std::to_string(i) + "]"));
        } else throw ConfigError(k + "." + bk, "unknown key");
      }
      if (from || to || step) {
        if (!(from && to && step)) throw ConfigError(k, "from, to and step go together");
        s.sweep_grid = linear_grid(*from, *to, *step);
      }
    } else if (k == "replications") s.replications = count(v, k);
    else if (k == "seed") s.seed = static_cast<std::uint64_t>(count(v, k));
    else if (k == "tolerance") s.tolerance = num(v, k);
    else if (k == "simulate") s.simulate = v.as<bool>();
    else if (k == "resolution") s.resolution = count(v, k);
    else if (k == "window_m") s.window = num(v, k);
    else if (k == "output") s.output = str(v, k);
    else if (k == "format") s.format = parse_format(str(v, k));
    else if (k == "workers") s.workers = static_cast<unsigned>(count(v, k));
    else throw ConfigError(k, "unknown key");
  }
  if (!have_scenario) throw ConfigError("scenario", "required");
  return s;
}

inline ExperimentSpec load_spec(const std::string& path) {
  YAML::Node n;
  try {
    n = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("spec", "cannot read '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("spec", path + ": YAML parse error: " + e.what());
  }
  return spec_from_yaml(n, std::filesystem::path(path).parent_path());
}

}  // namespace d2dhop
