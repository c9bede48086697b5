#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2dhop/experiment.hpp"
#include "d2dhop/presets.hpp"

using namespace d2dhop;

namespace {

const std::filesystem::path kScenarios = D2DHOP_SOURCE_DIR "/scenarios";

void expect_same(const NetworkConfig& a, const NetworkConfig& b) {
  auto near = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); };
  EXPECT_EQ(a.mode, b.mode);
  EXPECT_TRUE(near(a.lambda_b, b.lambda_b));
  EXPECT_TRUE(near(a.lambda_u, b.lambda_u));
  EXPECT_TRUE(near(a.delta, b.delta));
  EXPECT_TRUE(near(a.p_b, b.p_b));
  EXPECT_TRUE(near(a.p_d, b.p_d));
  EXPECT_TRUE(near(a.noise, b.noise));
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.b_total, b.b_total);
  EXPECT_EQ(a.b_c, b.b_c);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.subband_bandwidth_hz, b.subband_bandwidth_hz);
  ASSERT_EQ(a.num_types(), b.num_types());
  for (std::size_t i = 0; i < a.num_types(); ++i) {
    EXPECT_TRUE(near(a.d2d_types[i].lambda_d, b.d2d_types[i].lambda_d));
    EXPECT_EQ(a.d2d_types[i].b_d, b.d2d_types[i].b_d);
    EXPECT_EQ(a.d2d_types[i].p_t, b.d2d_types[i].p_t);
    EXPECT_EQ(a.d2d_types[i].p_f, b.d2d_types[i].p_f);
  }
}

std::string field_of(const std::string& yaml) {
  try {
    io::scenario_from_string(yaml);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

std::string run_to_string(const ExperimentSpec& s) {
  std::ostringstream out, log;
  run_into(s, out, log);
  return out.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Scenario, BundledFilesMatchPresets) {
  for (const auto& name : presets::names())
    expect_same(io::load_scenario((kScenarios / (name + ".yaml")).string()), presets::by_name(name));
}

TEST(Scenario, PresetNameLoadsDirectly) { expect_same(io::load_scenario("reference-shared"), presets::reference(Mode::Shared)); }

TEST(Scenario, CountPerAreaDensity) {
  const auto c = io::scenario_from_string("preset: reference-dedicated\nlambda_u: {count: 30, side_m: 1000}\n");
  EXPECT_DOUBLE_EQ(c.lambda_u, 30.0 / 1e6);
}

TEST(Scenario, FieldLevelDiagnostics) {
  EXPECT_EQ(field_of("preset: reference-dedicated\nbogus: 1\n"), "bogus");
  EXPECT_EQ(field_of("preset: reference-dedicated\nalpha: fast\n"), "alpha");
  EXPECT_EQ(field_of("preset: reference-dedicated\nalpha: 2\n"), "alpha");
  EXPECT_EQ(field_of("preset: reference-dedicated\nmode: hybrid\n"), "mode");
  EXPECT_EQ(field_of("preset: nope\n"), "preset");
  EXPECT_EQ(field_of("preset: reference-dedicated\nd2d_types:\n  - {b_d: 5, p_f: 1.5}\n"), "d2d_types[0].p_f");
  EXPECT_EQ(field_of("preset: reference-dedicated\nd2d_types:\n  - {b_d: 5, colour: red}\n"), "d2d_types[0].colour");
  EXPECT_EQ(field_of("preset: reference-dedicated\nlambda_b: {count: 1}\n"), "lambda_b");
  EXPECT_EQ(field_of("preset: reference-dedicated\ntheta: 1\n"), "theta");
  EXPECT_EQ(field_of("alpha: 3.5\n"), "lambda_b");
  EXPECT_EQ(field_of("[1, 2]"), "scenario");
  EXPECT_EQ(field_of("a: [unclosed"), "scenario");
}

TEST(Scenario, MissingFileIsConfigError) {
  EXPECT_THROW(io::load_scenario("/nonexistent/scenario.yaml"), ConfigError);
}

TEST(Output, ShortestRoundTripNumbers) {
  for (double x : {0.1, 1.0 / 3.0, 6e-05, 1e300, -2.5}) EXPECT_EQ(std::stod(io::fmt(x)), x);
  EXPECT_EQ(io::fmt(0.5), "0.5");
  EXPECT_EQ(io::fmt(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Output, CsvQuotesOnlyWhenNeeded) {
  EXPECT_EQ(io::csv_field("a|b:c"), "a|b:c");
  EXPECT_EQ(io::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Grid, LinearGridIsClean) {
  const auto g = linear_grid(0.0, 1.0, 0.02);
  ASSERT_EQ(g.size(), 51u);
  EXPECT_EQ(g[15], 0.3);
  EXPECT_EQ(g[35], 0.7);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_THROW(linear_grid(0.0, 1.0, 0.0), ConfigError);
  EXPECT_THROW(linear_grid(1.0, 0.0, 0.1), ConfigError);
}

TEST(Experiment, EmptyOrUnsortedSweepRejected) {
  ExperimentSpec s;
  s.scenario = presets::reference();
  s.task = Task::Sweep;
  s.sweep_var = "theta";
  EXPECT_THROW(s.validate(), ConfigError);
  s.sweep_grid = {0.2, 0.1};
  EXPECT_THROW(s.validate(), ConfigError);
  s.sweep_grid = {0.1, 0.2};
  EXPECT_NO_THROW(s.validate());
  s.sweep_var = "colour";
  EXPECT_THROW(run_to_string(s), ConfigError);
}

TEST(Experiment, SimulationNeedsReplications) {
  ExperimentSpec s;
  s.scenario = presets::reference();
  s.task = Task::Validate;
  s.replications = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Experiment, CoverageCsvCarriesParameters) {
  ExperimentSpec s;
  s.scenario = presets::reference();
  s.task = Task::Coverage;
  s.beta_points = 5;
  const auto l = lines(run_to_string(s));
  ASSERT_EQ(l.size(), 2u + 10u);
  EXPECT_EQ(l[0], std::string("# d2dhop ") + kVersion + " seed=none");
  EXPECT_EQ(l[1].rfind("beta_db,beta_linear,ccdf,mode,link_class,lambda_b,", 0), 0u);
  EXPECT_EQ(l[2].rfind("-20,0.01,", 0), 0u);
  EXPECT_NE(l[2].find(",dedicated,d2d,"), std::string::npos);
  EXPECT_NE(l[11].find(",dedicated,cellular,"), std::string::npos);
  EXPECT_NE(l[2].find("6e-05:5:1:0.2|6e-05:15:1:0.6"), std::string::npos);
}

TEST(Experiment, ThetaSweepRowsInGridOrder) {
  ExperimentSpec s;
  s.scenario = presets::distance280();
  s.task = Task::Sweep;
  s.sweep_var = "theta";
  s.sweep_grid = linear_grid(0.0, 1.0, 0.25);
  s.workers = 3;
  const auto l = lines(run_to_string(s));
  ASSERT_EQ(l.size(), 3u + 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(l[3 + i].rfind("theta," + io::fmt(s.sweep_grid[i]) + ",", 0), 0u);
  // θ = 1 has no cellular spectrum: rate columns empty, objective present.
  EXPECT_EQ(l.back().rfind("theta,1,dedicated,,,,,,,", 0), 0u);
}

TEST(Experiment, PenaltySweepReportsTimeHopping) {
  ExperimentSpec s;
  s.scenario = presets::reference();
  s.task = Task::Sweep;
  s.sweep_var = "w";
  s.sweep_grid = {1e-3, 2.0};
  const auto l = lines(run_to_string(s));
  EXPECT_NE(l[3].find(",0;0,"), std::string::npos);
  EXPECT_NE(l[4].find(",1;1,"), std::string::npos);
}

TEST(Experiment, DensitySweepKeepsRatio) {
  auto base = presets::reference();
  auto c = base;
  apply_sweep_value(c, base, "density", 3e-5);
  EXPECT_DOUBLE_EQ(c.total_d2d_density(), 3e-5);
  EXPECT_DOUBLE_EQ(c.total_d2d_density() / c.lambda_u, base.total_d2d_density() / base.lambda_u);
  c = base;
  apply_sweep_value(c, base, "p_f[1]", 0.4);
  EXPECT_EQ(c.d2d_types[1].p_f, 0.4);
  EXPECT_EQ(c.d2d_types[0].p_f, 0.2);
  EXPECT_THROW(apply_sweep_value(c, base, "p_f[7]", 0.4), ConfigError);
}

TEST(Experiment, ValidateIsDeterministicAcrossWorkerCounts) {
  ExperimentSpec s;
  s.scenario = presets::reference(Mode::Shared);
  s.task = Task::Validate;
  s.replications = 300;
  s.seed = 42;
  s.beta_points = 8;
  s.tolerance = 1.0;
  s.workers = 1;
  const auto a = run_to_string(s);
  s.workers = 3;
  const auto b = run_to_string(s);
  EXPECT_EQ(a, b);
  EXPECT_EQ(lines(a)[0], std::string("# d2dhop ") + kVersion + " seed=42");
  s.seed = 43;
  EXPECT_NE(a, run_to_string(s));
}

TEST(Experiment, OptimizeRecordListsCandidates) {
  ExperimentSpec s;
  s.scenario = presets::reference();
  s.task = Task::Optimize;
  const auto out = run_to_string(s);
  EXPECT_NE(out.find("theta_star = 1\n"), std::string::npos);
  EXPECT_NE(out.find("candidate.2.interval = 0.3;1\n"), std::string::npos);
  s.format = Format::Json;
  const auto j = nlohmann::json::parse(run_to_string(s));
  EXPECT_EQ(j["theta_star"], 1.0);
  EXPECT_EQ(j["candidate_set"].size(), 3u);
  s.format = Format::Csv;
  EXPECT_THROW(run_to_string(s), ConfigError);
}

TEST(Experiment, SpecFileResolvesScenarioRelativeToItself) {
  const auto s = load_spec((kScenarios / "experiments" / "theta-sweep-280m.yaml").string());
  EXPECT_EQ(s.task, Task::Sweep);
  EXPECT_EQ(s.sweep_grid.size(), 51u);
  expect_same(s.scenario, presets::distance280());
  EXPECT_THROW(spec_from_yaml(YAML::Load("task: rates\n")), ConfigError);
  EXPECT_THROW(spec_from_yaml(YAML::Load("scenario: reference-dedicated\nreplicas: 3\n")), ConfigError);
}

namespace {

struct Proc {
  int status;
  std::string out;
};

Proc cli(const std::string& args) {
  const std::string cmd = std::string(D2DHOP_CLI) + " " + args + " 2>&1";
  Proc p{0, {}};
  FILE* f = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), f)) p.out.append(buf.data(), n);
  const int st = pclose(f);
  p.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

}  // namespace

TEST(Cli, ExitCodesAndDiagnostics) {
  const auto tmp = std::filesystem::temp_directory_path() / "d2dhop_cli_test.yaml";
  std::ofstream(tmp) << "preset: reference-dedicated\nd2d_types:\n  - {b_d: 80}\n";
  auto p = cli("rates " + tmp.string());
  EXPECT_EQ(p.status, 2);
  EXPECT_NE(p.out.find("d2d_types[0].b_d"), std::string::npos) << p.out;
  p = cli("rates reference-dedicated");
  EXPECT_EQ(p.status, 0);
  EXPECT_NE(p.out.find("rate_density = "), std::string::npos);
  p = cli("sweep reference-dedicated --var theta --from 0.5 --to 0.1 --step 0.1");
  EXPECT_EQ(p.status, 2);
  p = cli("validate reference-dedicated --replications 200 --points 4 --tol 1e-9");
  EXPECT_EQ(p.status, 1);
  EXPECT_NE(p.out.find("FAIL"), std::string::npos);
  std::filesystem::remove(tmp);
}

TEST(Cli, ValidateWritesIdenticalFilesForOneAndManyWorkers) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = dir / "d2dhop_det_a.csv", b = dir / "d2dhop_det_b.csv";
  ASSERT_EQ(cli("validate reference-dedicated --replications 300 --seed 9 --tol 1 --workers 1 -o " + a.string()).status, 0);
  ASSERT_EQ(cli("validate reference-dedicated --replications 300 --seed 9 --tol 1 --workers 4 -o " + b.string()).status, 0);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_GT(sa.str().size(), 1000u);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}
