#pragma once

#include <algorithm>
#include <stdexcept>

#include "d2dhop/config.hpp"

namespace d2dhop {

/// Expected-load quantities shared by every coverage and rate expression.
struct LoadState {
  double rho = 0.0;             // fraction of normal (transmitting) RBs
  double p_a = 1.0;             // admission probability
  double lambda_d_tilde = 0.0;  // density of co-channel active D2D transmitters
  double b_cellular = 0.0;      // B_C
};

/// Raised when the cellular tier has no spectrum (θ = 1 in a dedicated network).
class NoCellularSpectrum : public std::domain_error {
public:
  NoCellularSpectrum() : std::domain_error("no cellular spectrum: B_C = 0 (theta = 1 in dedicated mode)") {}
};

/// Σ_i p_t,i · p_f,i · λ_D,i  (thinning + superposition of the per-type PPPs).
inline double effective_d2d_density(const NetworkConfig& cfg) {
  double s = 0.0;
  for (const auto& t : cfg.d2d_types) s += t.p_t * t.p_f * t.lambda_d;
  return s;
}

/// Expected subband demand per unit area routed through the BSs:
/// b_C λ_U + Σ_i (1 − p_t,i) b_D,i λ_D,i.
inline double cellular_load_density(const NetworkConfig& cfg) {
  double s = cfg.b_c * cfg.lambda_u;
  for (const auto& t : cfg.d2d_types) s += (1.0 - t.p_t) * t.b_d * t.lambda_d;
  return s;
}

/// ρ: mean cell area 1/λ_B, clamped to 1. No demand means no transmitting RBs,
/// even without cellular spectrum.
inline double normal_rb_fraction(const NetworkConfig& cfg) {
  const double load = cellular_load_density(cfg);
  if (load <= 0.0) return 0.0;
  const double bc = cfg.cellular_subbands();
  if (bc <= 0.0) throw NoCellularSpectrum();
  if (cfg.lambda_b <= 0.0) return 1.0;
  return std::min(load / (cfg.lambda_b * bc), 1.0);
}

/// p_a: the typical user's cell has mean area 9/(7λ_B) (size-biased), clamped to 1.
inline double admission_probability(const NetworkConfig& cfg) {
  const double load = cellular_load_density(cfg);
  if (load <= 0.0) return 1.0;
  const double bc = cfg.cellular_subbands();
  if (bc <= 0.0) throw NoCellularSpectrum();
  return std::min(7.0 * bc * cfg.lambda_b / (9.0 * load), 1.0);
}

/// Congested regime 7·B_C·λ_B < 9·b_C·λ_U in which ρ is taken as 1.
inline bool heavily_loaded(const NetworkConfig& cfg) {
  return 7.0 * cfg.cellular_subbands() * cfg.lambda_b < 9.0 * cfg.b_c * cfg.lambda_u;
}

inline LoadState load_state(const NetworkConfig& cfg) {
  LoadState s;
  s.b_cellular = cfg.cellular_subbands();
  s.lambda_d_tilde = effective_d2d_density(cfg);
  s.rho = normal_rb_fraction(cfg);
  s.p_a = admission_probability(cfg);
  return s;
}

/// Load state used by the optimizer: in the congested regime ρ = 1 and p_a is
/// the unclamped ratio (which may be 0 when B_C = 0). Otherwise the regular
/// clamped expressions apply.
inline LoadState heavy_load_state(const NetworkConfig& cfg) {
  if (!heavily_loaded(cfg)) return load_state(cfg);
  LoadState s;
  s.b_cellular = cfg.cellular_subbands();
  s.lambda_d_tilde = effective_d2d_density(cfg);
  s.rho = 1.0;
  s.p_a = 7.0 * s.b_cellular * cfg.lambda_b / (9.0 * cellular_load_density(cfg));
  return s;
}

}  // namespace d2dhop
