#pragma once

// Scenario files. YAML mapping that mirrors NetworkConfig field names, with
// unit-bearing alternatives accepted at this boundary only:
//
//   preset: reference-dedicated        # optional starting point
//   mode: dedicated                 # or shared
//   lambda_b: {count: 1, side_m: 500}   # or a plain number in m^-2
//   p_b_dbm: 46                     # or p_b in watts
//   mean_distance_m: 50             # or delta (Rayleigh scale, m)
//   d2d_types:
//     - {lambda_d: {count: 15, side_m: 500}, b_d: 5, p_t: 1, p_f: 0.2}

#include <yaml-cpp/yaml.h>

#include <set>
#include <string>

#include "d2dhop/config.hpp"
#include "d2dhop/presets.hpp"

namespace d2dhop::io {

namespace detail {

inline double number(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "expected a number, got '" + n.Scalar() + "'");
  }
}

/// A density: m^-2 number, or {count, side_m} meaning count per side_m².
inline double density(const YAML::Node& n, const std::string& field) {
  if (n.IsMap()) {
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      if (k != "count" && k != "side_m") throw ConfigError(field + "." + k, "unknown key (expected count, side_m)");
    }
    if (!n["count"] || !n["side_m"]) throw ConfigError(field, "count-per-area density needs both count and side_m");
    const double side = number(n["side_m"], field + ".side_m");
    if (!(side > 0.0)) throw ConfigError(field + ".side_m", "must be > 0");
    return per_square(number(n["count"], field + ".count"), side);
  }
  return number(n, field);
}

inline Mode mode_from(const YAML::Node& n, const std::string& field) {
  const auto s = n.IsScalar() ? n.Scalar() : std::string();
  if (s == "dedicated") return Mode::Dedicated;
  if (s == "shared") return Mode::Shared;
  throw ConfigError(field, "expected 'dedicated' or 'shared'");
}

inline D2DTypeConfig d2d_type(const YAML::Node& n, const std::string& p) {
  if (!n.IsMap()) throw ConfigError(p, "expected a mapping");
  D2DTypeConfig t;
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    const auto f = p + "." + k;
    if (k == "lambda_d") t.lambda_d = density(kv.second, f);
    else if (k == "b_d") t.b_d = number(kv.second, f);
    else if (k == "p_t") t.p_t = number(kv.second, f);
    else if (k == "p_f") t.p_f = number(kv.second, f);
    else throw ConfigError(f, "unknown key");
  }
  return t;
}

}  // namespace detail

inline Mode parse_mode(const std::string& s) {
  return detail::mode_from(YAML::Node(s), "mode");
}

/// Parses a scenario mapping and validates it.
inline NetworkConfig scenario_from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("scenario", "expected a mapping at the top level");
  NetworkConfig c;
  bool have_base = false;
  if (const auto p = root["preset"]) {
    try {
      c = presets::by_name(p.as<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("preset", e.what());
    }
    have_base = true;
  }
  std::set<std::string> seen;
  for (const auto& kv : root) {
    const auto k = kv.first.as<std::string>();
    const auto& v = kv.second;
    seen.insert(k);
    using namespace detail;
    if (k == "preset" || k == "name") continue;
    if (k == "mode") c.mode = mode_from(v, k);
    else if (k == "lambda_b") c.lambda_b = density(v, k);
    else if (k == "lambda_u") c.lambda_u = density(v, k);
    else if (k == "delta") c.delta = number(v, k);
    else if (k == "mean_distance_m") c.delta = delta_from_mean_distance(number(v, k));
    else if (k == "p_b") c.p_b = number(v, k);
    else if (k == "p_b_dbm") c.p_b = dbm_to_watts(number(v, k));
    else if (k == "p_d") c.p_d = number(v, k);
    else if (k == "p_d_dbm") c.p_d = dbm_to_watts(number(v, k));
    else if (k == "noise") c.noise = number(v, k);
    else if (k == "noise_dbm") c.noise = dbm_to_watts(number(v, k));
    else if (k == "alpha") c.alpha = number(v, k);
    else if (k == "b_total") c.b_total = number(v, k);
    else if (k == "b_c") c.b_c = number(v, k);
    else if (k == "w") c.w = number(v, k);
    else if (k == "theta") c.theta = number(v, k);
    else if (k == "subband_bandwidth_hz") c.subband_bandwidth_hz = number(v, k);
    else if (k == "d2d_types") {
      if (!v.IsSequence()) throw ConfigError(k, "expected a list of type mappings");
      c.d2d_types.clear();
      for (std::size_t i = 0; i < v.size(); ++i) c.d2d_types.push_back(d2d_type(v[i], k + "[" + std::to_string(i) + "]"));
    } else {
      throw ConfigError(k, "unknown key");
    }
  }
  if (!have_base) {
    // Without a preset every physical field must be given explicitly.
    for (const char* req : {"lambda_b", "lambda_u", "alpha", "b_total", "b_c", "d2d_types"})
      if (!seen.count(req)) throw ConfigError(req, "required (no preset given)");
    if (!seen.count("delta") && !seen.count("mean_distance_m")) throw ConfigError("delta", "required (or mean_distance_m)");
    if (!seen.count("p_b") && !seen.count("p_b_dbm")) throw ConfigError("p_b", "required (or p_b_dbm)");
    if (!seen.count("p_d") && !seen.count("p_d_dbm")) throw ConfigError("p_d", "required (or p_d_dbm)");
  }
  c.validate();
  return c;
}

inline NetworkConfig scenario_from_string(const std::string& text) {
  YAML::Node n;
  try {
    n = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("scenario", std::string("YAML parse error: ") + e.what());
  }
  return scenario_from_yaml(n);
}

/// Loads a scenario file, or a bundled preset when `ref` names one.
inline NetworkConfig load_scenario(const std::string& ref) {
  for (const auto& n : presets::names())
    if (n == ref) return presets::by_name(ref);
  YAML::Node node;
  try {
    node = YAML::LoadFile(ref);
  } catch (const YAML::BadFile&) {
    throw ConfigError("scenario", "cannot read '" + ref + "' (not a file or preset name)");
  } catch (const YAML::Exception& e) {
    throw ConfigError("scenario", ref + ": YAML parse error: " + e.what());
  }
  return scenario_from_yaml(node);
}

}  // namespace d2dhop::io
