#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2dhop {

enum class Mode { Dedicated, Shared };
enum class LinkClass { D2D, Cellular };

inline const char* to_string(Mode m) { return m == Mode::Dedicated ? "dedicated" : "shared"; }
inline const char* to_string(LinkClass c) { return c == LinkClass::D2D ? "d2d" : "cellular"; }

/// Raised when a scenario violates a parameter invariant. `field()` names the
/// offending parameter using the scenario-file key (e.g. "d2d_types[1].p_f").
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// Unit conversions used at the config boundary only.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Density given as "count per square of side `side_m` metres", in m^-2.
inline double per_square(double count, double side_m) { return count / (side_m * side_m); }

/// Rayleigh scale δ for a given mean link distance (mean = δ·sqrt(π/2)).
inline double delta_from_mean_distance(double mean_m) { return mean_m / std::sqrt(std::numbers::pi / 2.0); }
inline double mean_distance_from_delta(double delta) { return delta * std::sqrt(std::numbers::pi / 2.0); }

struct D2DTypeConfig {
  double lambda_d = 0.0;  // m^-2
  double b_d = 1.0;       // subbands
  double p_t = 1.0;
  double p_f = 1.0;
};

/// One scenario. Internal units: m^-2, m, W, linear ratios.
struct NetworkConfig {
  double lambda_b = 0.0;
  double lambda_u = 0.0;
  std::vector<D2DTypeConfig> d2d_types;
  double delta = 0.0;
  double p_b = 0.0;
  double p_d = 0.0;
  double noise = 0.0;
  double alpha = 4.0;
  double b_total = 1.0;
  double b_c = 1.0;
  double w = 2.0;
  double theta = 0.0;
  Mode mode = Mode::Dedicated;
  double subband_bandwidth_hz = 200e3;

  std::size_t num_types() const noexcept { return d2d_types.size(); }

  double total_d2d_density() const noexcept {
    double s = 0.0;
    for (const auto& t : d2d_types) s += t.lambda_d;
    return s;
  }

  /// Subbands available to the cellular tier (B_C).
  double cellular_subbands() const noexcept {
    return mode == Mode::Dedicated ? (1.0 - theta) * b_total : b_total;
  }

  /// Subbands a D2D link can hop over (θB dedicated, B shared).
  double d2d_subbands() const noexcept {
    return mode == Mode::Dedicated ? theta * b_total : b_total;
  }

  NetworkConfig with_mode(Mode m) const {
    NetworkConfig c = *this;
    c.mode = m;
    return c;
  }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

namespace detail {
inline void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}
inline bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
}  // namespace detail

inline void NetworkConfig::validate() const {
  using detail::finite_nonneg;
  using detail::require;
  require(finite_nonneg(lambda_b), "lambda_b", "density must be finite and >= 0");
  require(finite_nonneg(lambda_u), "lambda_u", "density must be finite and >= 0");
  require(!d2d_types.empty(), "d2d_types", "at least one D2D type is required");
  require(finite_nonneg(delta), "delta", "must be finite and >= 0");
  require(finite_nonneg(p_b), "p_b", "power must be finite and >= 0");
  require(finite_nonneg(p_d), "p_d", "power must be finite and >= 0");
  require(finite_nonneg(noise), "noise", "noise power must be finite and >= 0");
  require(std::isfinite(alpha) && alpha > 2.0, "alpha", "path-loss exponent must exceed 2");
  require(std::isfinite(b_total) && b_total >= 1.0, "b_total", "need at least one subband");
  require(std::isfinite(b_c) && b_c >= 0.0 && b_c <= b_total, "b_c", "cellular demand must lie in [0, b_total]");
  require(std::isfinite(w) && w > 0.0, "w", "cellular-mode penalty must be > 0");
  require(std::isfinite(theta) && theta >= 0.0 && theta <= 1.0, "theta", "must lie in [0, 1]");
  require(std::isfinite(subband_bandwidth_hz) && subband_bandwidth_hz > 0.0, "subband_bandwidth_hz",
          "must be > 0");
  if (mode == Mode::Dedicated && theta >= 1.0 && lambda_u > 0.0)
    throw ConfigError("theta", "theta = 1 leaves no cellular spectrum for a nonzero cellular population");
  for (std::size_t i = 0; i < d2d_types.size(); ++i) {
    const auto& t = d2d_types[i];
    const std::string p = "d2d_types[" + std::to_string(i) + "].";
    require(finite_nonneg(t.lambda_d), p + "lambda_d", "density must be finite and >= 0");
    require(std::isfinite(t.b_d) && t.b_d >= 1.0 && t.b_d <= b_total, p + "b_d", "demand must lie in [1, b_total]");
    require(std::isfinite(t.p_t) && t.p_t >= 0.0 && t.p_t <= 1.0, p + "p_t", "must lie in [0, 1]");
    require(std::isfinite(t.p_f) && t.p_f >= 0.0 && t.p_f <= 1.0, p + "p_f", "must lie in [0, 1]");
  }
}

}  // namespace d2dhop
