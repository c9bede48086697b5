#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "d2dhop/config.hpp"

namespace d2dhop::presets {

/// Simulation parameters of the reference deployment: 10 MHz in 50
/// subbands, one BS per 500 m square, 60 UEs and 2x15 D2D links per square.
inline NetworkConfig reference(Mode mode = Mode::Dedicated) {
  NetworkConfig c;
  const double cell = 500.0;
  c.lambda_b = per_square(1, cell);
  c.lambda_u = per_square(60, cell);
  const bool ded = mode == Mode::Dedicated;
  c.d2d_types = {{per_square(15, cell), 5.0, 1.0, ded ? 0.2 : 0.1}, {per_square(15, cell), 15.0, 1.0, ded ? 0.6 : 0.3}};
  c.delta = delta_from_mean_distance(50.0);
  c.p_b = dbm_to_watts(46.0);
  c.p_d = dbm_to_watts(20.0);
  c.noise = dbm_to_watts(-104.0);
  c.alpha = 3.5;
  c.b_total = 50.0;
  c.b_c = 5.0;
  c.w = 2.0;
  c.theta = 0.5;
  c.mode = mode;
  c.subband_bandwidth_hz = 10e6 / 50.0;
  return c;
}

/// Reference deployment with 280 m mean D2D link distance.
inline NetworkConfig distance280() {
  auto c = reference(Mode::Dedicated);
  c.delta = delta_from_mean_distance(280.0);
  return c;
}

/// Light-load comparison: total D2D density 0.1·λ_B, split evenly over the two types.
inline NetworkConfig lowdensity(Mode mode = Mode::Dedicated) {
  auto c = reference(mode);
  for (auto& t : c.d2d_types) t.lambda_d = 0.05 * c.lambda_b;
  return c;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"reference-dedicated", "reference-shared", "distance280",
                                             "lowdensity-lambdaD-0.1", "lowdensity-lambdaD-0.1-shared"};
  return n;
}

inline NetworkConfig by_name(std::string_view name) {
  if (name == "reference-dedicated") return reference(Mode::Dedicated);
  if (name == "reference-shared") return reference(Mode::Shared);
  if (name == "distance280") return distance280();
  if (name == "lowdensity-lambdaD-0.1") return lowdensity(Mode::Dedicated);
  if (name == "lowdensity-lambdaD-0.1-shared") return lowdensity(Mode::Shared);
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

}  // namespace d2dhop::presets
