#pragma once

// Plot-ready outputs: CSV curves and tables, flat key/value records, JSON.
// Numbers use the shortest round-trip representation so files are
// byte-identical across runs and worker counts.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "d2dhop/config.hpp"
#include "d2dhop/coverage.hpp"
#include "d2dhop/optimizer.hpp"
#include "d2dhop/rates.hpp"
#include "d2dhop/sim/deployment.hpp"
#include "d2dhop/sim/empirical.hpp"
#include "d2dhop/version.hpp"

namespace d2dhop::io {

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string fmt(std::uint64_t x) { return std::to_string(x); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

class CsvWriter {
public:
  /// Writes the `# d2dhop <version> seed=<seed>` comment and the column row.
  CsvWriter(std::ostream& os, std::vector<std::string> columns, std::optional<std::uint64_t> seed,
            const std::vector<std::string>& comments = {})
      : os_(os), width_(columns.size()) {
    os_ << "# d2dhop " << kVersion << " seed=" << (seed ? fmt(*seed) : std::string("none")) << '\n';
    for (const auto& c : comments) os_ << "# " << c << '\n';
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_field(cells[i]);
    os_ << '\n';
  }

private:
  std::ostream& os_;
  std::size_t width_;
};

/// Per-type parameters packed into one cell: lambda_d:b_d:p_t:p_f|...
inline std::string types_field(const NetworkConfig& c) {
  std::string s;
  for (std::size_t i = 0; i < c.num_types(); ++i) {
    const auto& t = c.d2d_types[i];
    if (i) s += '|';
    s += fmt(t.lambda_d) + ':' + fmt(t.b_d) + ':' + fmt(t.p_t) + ':' + fmt(t.p_f);
  }
  return s;
}

/// Columns carrying the full scenario, appended to every data row.
inline std::vector<std::string> parameter_columns() {
  return {"lambda_b", "lambda_u", "delta", "p_b", "p_d", "noise", "alpha", "b_total", "b_c", "w", "theta",
          "subband_bandwidth_hz", "d2d_types"};
}

inline std::vector<std::string> parameter_values(const NetworkConfig& c) {
  return {fmt(c.lambda_b), fmt(c.lambda_u), fmt(c.delta), fmt(c.p_b), fmt(c.p_d), fmt(c.noise), fmt(c.alpha),
          fmt(c.b_total), fmt(c.b_c), fmt(c.w), fmt(c.theta), fmt(c.subband_bandwidth_hz), types_field(c)};
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline const std::vector<std::string>& curve_columns() {
  static const std::vector<std::string> c = {"beta_db", "beta_linear", "ccdf", "mode", "link_class"};
  return c;
}

inline void write_curve_csv(std::ostream& os, const NetworkConfig& cfg, const std::vector<CoverageCurve>& curves) {
  CsvWriter w(os, concat(curve_columns(), parameter_columns()), std::nullopt);
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.betas.size(); ++i)
      w.row(concat({fmt(linear_to_db(c.betas[i])), fmt(c.betas[i]), fmt(c.ccdf[i]), to_string(c.mode),
                    to_string(c.link_class)},
                   parameter_values(cfg)));
}

/// Empirical curves; when `analytic` is given (one curve per empirical curve)
/// the analytic value and absolute deviation are appended.
inline void write_empirical_csv(std::ostream& os, const NetworkConfig& cfg, const std::vector<sim::EmpiricalCcdf>& curves,
                                const std::vector<CoverageCurve>* analytic = nullptr) {
  auto cols = concat(curve_columns(), {"ci_low", "ci_high", "replications", "seed"});
  if (analytic) cols = concat(cols, {"analytic", "abs_deviation"});
  const std::uint64_t seed = curves.empty() ? 0 : curves.front().seed;
  CsvWriter w(os, concat(cols, parameter_columns()), seed);
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& e = curves[k];
    for (std::size_t i = 0; i < e.betas.size(); ++i) {
      const auto [lo, hi] = e.interval(i);
      std::vector<std::string> r = {fmt(linear_to_db(e.betas[i])), fmt(e.betas[i]), fmt(e.value(i)), to_string(e.mode),
                                    to_string(e.link_class), fmt(lo), fmt(hi), fmt(std::uint64_t(e.replications)),
                                    fmt(e.seed)};
      if (analytic) {
        const double a = (*analytic)[k].ccdf[i];
        r = concat(r, {fmt(a), fmt(std::abs(a - e.value(i)))});
      }
      w.row(concat(r, parameter_values(cfg)));
    }
  }
}

/// Point list for deployment diagrams: kind,x,y,type,active,partner.
inline void write_deployment_csv(std::ostream& os, const sim::Deployment& d) {
  CsvWriter w(os, {"kind", "x", "y", "type", "active", "link"}, d.seed,
              {"window_m=" + fmt(d.window) + (d.receivers_sampled ? "" : " receivers=not_sampled")});
  for (const auto& p : d.bs) w.row({"bs", fmt(p.x), fmt(p.y), "", "", ""});
  for (const auto& p : d.ue) w.row({"ue", fmt(p.x), fmt(p.y), "", "", ""});
  for (std::size_t i = 0; i < d.links.size(); ++i) {
    const auto& l = d.links[i];
    const std::string a = l.active ? "1" : "0";
    w.row({"d2d_tx", fmt(l.tx.x), fmt(l.tx.y), fmt(std::uint64_t(l.type)), a, fmt(std::uint64_t(i))});
    if (d.receivers_sampled) w.row({"d2d_rx", fmt(l.rx.x), fmt(l.rx.y), fmt(std::uint64_t(l.type)), a, fmt(std::uint64_t(i))});
  }
}

/// Flat `key = value` record.
class Record {
public:
  explicit Record(std::ostream& os) : os_(os) {}
  Record& operator()(const std::string& k, const std::string& v) {
    os_ << k << " = " << v << '\n';
    return *this;
  }
  Record& operator()(const std::string& k, double v) { return (*this)(k, fmt(v)); }

private:
  std::ostream& os_;
};

inline nlohmann::json to_json(const NetworkConfig& c) {
  nlohmann::json j = {{"mode", to_string(c.mode)}, {"lambda_b", c.lambda_b}, {"lambda_u", c.lambda_u},
                      {"delta", c.delta}, {"p_b", c.p_b}, {"p_d", c.p_d}, {"noise", c.noise}, {"alpha", c.alpha},
                      {"b_total", c.b_total}, {"b_c", c.b_c}, {"w", c.w}, {"theta", c.theta},
                      {"subband_bandwidth_hz", c.subband_bandwidth_hz}};
  for (const auto& t : c.d2d_types)
    j["d2d_types"].push_back({{"lambda_d", t.lambda_d}, {"b_d", t.b_d}, {"p_t", t.p_t}, {"p_f", t.p_f}});
  return j;
}

inline nlohmann::json to_json(const NetworkConfig& cfg, const RateReport& r) {
  return {{"version", kVersion},
          {"scenario", to_json(cfg)},
          {"rate_cellular", r.rate_cellular},
          {"rate_d2d_per_type", r.rate_d2d_per_type},
          {"rate_d2d_mixture", r.rate_d2d_mixture},
          {"lb_cellular", r.lb_cellular},
          {"lb_d2d_per_type", r.lb_d2d_per_type},
          {"lb_d2d_mixture", r.lb_d2d_mixture},
          {"beta_c_star", r.beta_c_star},
          {"beta_d_star", r.beta_d_star},
          {"se_cellular", r.se_cellular},
          {"se_d2d", r.se_d2d},
          {"rho", r.load.rho},
          {"p_a", r.load.p_a},
          {"lambda_d_tilde", r.load.lambda_d_tilde},
          {"total_rate_per_cell_bps", total_rate_per_cell(cfg, r)},
          {"rate_units", "subband x bit/s/Hz"}};
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt(v[i]);
  return s;
}

inline void write_record(std::ostream& os, const NetworkConfig& cfg, const RateReport& r) {
  Record rec(os);
  rec("version", kVersion)("mode", to_string(r.mode));
  for (std::size_t i = 0; i < parameter_columns().size(); ++i) rec(parameter_columns()[i], parameter_values(cfg)[i]);
  rec("rate_cellular", r.rate_cellular)("rate_d2d_per_type", join(r.rate_d2d_per_type))(
      "rate_d2d_mixture", r.rate_d2d_mixture)("lb_cellular", r.lb_cellular)("lb_d2d_per_type", join(r.lb_d2d_per_type))(
      "lb_d2d_mixture", r.lb_d2d_mixture)("beta_c_star", r.beta_c_star)("beta_d_star", r.beta_d_star)(
      "se_cellular", r.se_cellular)("se_d2d", r.se_d2d)("rho", r.load.rho)("p_a", r.load.p_a)(
      "lambda_d_tilde", r.load.lambda_d_tilde)("total_rate_per_cell_bps", total_rate_per_cell(cfg, r));
}

inline nlohmann::json to_json(const PartitionSolution& s) {
  nlohmann::json j = {{"version", kVersion},
                      {"method", to_string(s.method)},
                      {"p_t_star", s.p_t_star},
                      {"p_f_star", s.p_f_star},
                      {"theta_star", s.theta_star},
                      {"objective", s.objective},
                      {"beta_c", s.beta_c},
                      {"beta_d", s.beta_d},
                      {"heavy_load", s.heavy_load},
                      {"decreasing_regions_suffice", s.decreasing_regions_suffice},
                      {"candidate_set", nlohmann::json::array()}};
  for (const auto& c : s.candidate_set) {
    const auto& r = s.coeffs[c.region];
    j["candidate_set"].push_back({{"region", c.region},
                                  {"lo", c.lo},
                                  {"hi", c.hi},
                                  {"theta", c.theta},
                                  {"objective", c.objective},
                                  {"non_decreasing", c.non_decreasing},
                                  {"literal_theta", c.literal_theta},
                                  {"literal_objective", r.objective(c.literal_theta)},
                                  {"A", r.A}, {"C", r.C}, {"D", r.D}, {"E", r.E}, {"F", r.F}});
  }
  return j;
}

inline void write_record(std::ostream& os, const PartitionSolution& s) {
  Record rec(os);
  rec("version", kVersion)("method", to_string(s.method))("p_t_star", join(s.p_t_star))("p_f_star", join(s.p_f_star))(
      "theta_star", s.theta_star)("objective", s.objective)("beta_c", s.beta_c)("beta_d", s.beta_d)(
      "heavy_load", s.heavy_load ? "true" : "false")("decreasing_regions_suffice",
                                                     s.decreasing_regions_suffice ? "true" : "false");
  for (const auto& c : s.candidate_set) {
    const auto& r = s.coeffs[c.region];
    const std::string p = "candidate." + std::to_string(c.region) + ".";
    rec(p + "interval", fmt(c.lo) + ";" + fmt(c.hi))(p + "theta", c.theta)(p + "objective", c.objective)(
        p + "non_decreasing", c.non_decreasing ? "true" : "false")(p + "literal_theta", c.literal_theta)(
        p + "literal_objective", r.objective(c.literal_theta))(p + "coefficients",
                                                               join({r.A, r.C, r.D, r.E, r.F}));
  }
}

}  // namespace d2dhop::io
