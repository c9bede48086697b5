#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "d2dhop/config.hpp"
#include "d2dhop/load.hpp"
#include "d2dhop/sim/deployment.hpp"

namespace d2dhop::sim {

/// Stands in for an infinite SINR (no interference and no noise). Larger
/// than any threshold, and never averaged as a number.
inline constexpr double kInfiniteSinr = std::numeric_limits<double>::max();

struct SinrParts {
  double signal = 0.0;
  double d2d_interference = 0.0;
  double bs_interference = 0.0;
};

namespace detail {

inline double path_gain(double dist2, double alpha) { return std::pow(dist2, -0.5 * alpha); }

template <class Rng>
double d2d_interference(const Deployment& dep, const NetworkConfig& cfg, const Point& at, Rng& rng) {
  double s = 0.0;
  for (const auto& l : dep.links) {
    if (!l.on_reference) continue;
    s += cfg.p_d * exp1(rng) * path_gain(torus_dist2(l.tx, at, dep.window), cfg.alpha);
  }
  return s;
}

template <class Rng>
double bs_interference(const Deployment& dep, const NetworkConfig& cfg, double rho, const Point& at,
                       std::ptrdiff_t skip, Rng& rng) {
  double s = 0.0;
  for (std::size_t b = 0; b < dep.bs.size(); ++b) {
    if (static_cast<std::ptrdiff_t>(b) == skip || !(dep.bs_uniform[b] < rho)) continue;
    s += cfg.p_b * exp1(rng) * path_gain(torus_dist2(dep.bs[b], at, dep.window), cfg.alpha);
  }
  return s;
}

inline std::ptrdiff_t nearest_bs(const Deployment& dep, const Point& at) {
  std::ptrdiff_t best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < dep.bs.size(); ++b) {
    const double d2 = torus_dist2(dep.bs[b], at, dep.window);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::ptrdiff_t>(b);
    }
  }
  return best;
}

}  // namespace detail

/// Signal and interference powers at the typical receiver on the reference
/// subband. BSs interfere when they pass the ρ-thinning of `mode`; D2D
/// interferers are the active links occupying the reference subband.
template <class Rng>
SinrParts measure_parts(const Deployment& dep, const NetworkConfig& cfg, LinkClass cls, Mode mode, Rng& rng) {
  const auto c = cfg.with_mode(mode);
  const double rho = load_state(c).rho;
  SinrParts p;
  if (cls == LinkClass::D2D) {
    if (!dep.typical_link) throw std::invalid_argument("D2D measurement needs a planted typical link");
    const auto& t = *dep.typical_link;
    p.signal = c.p_d * exp1(rng) * detail::path_gain(torus_dist2(t.tx, t.rx, dep.window), c.alpha);
    p.d2d_interference = detail::d2d_interference(dep, c, t.rx, rng);
    if (mode == Mode::Shared) p.bs_interference = detail::bs_interference(dep, c, rho, t.rx, -1, rng);
  } else {
    const auto serving = detail::nearest_bs(dep, dep.centre);
    if (serving < 0) throw std::invalid_argument("cellular measurement needs at least one BS");
    p.signal = c.p_b * exp1(rng) *
               detail::path_gain(torus_dist2(dep.bs[static_cast<std::size_t>(serving)], dep.centre, dep.window), c.alpha);
    p.bs_interference = detail::bs_interference(dep, c, rho, dep.centre, serving, rng);
    if (mode == Mode::Shared) p.d2d_interference = detail::d2d_interference(dep, c, dep.centre, rng);
  }
  return p;
}

inline double sinr_from_parts(const SinrParts& p, double noise) {
  const double den = p.d2d_interference + p.bs_interference + noise;
  if (den <= 0.0) return kInfiniteSinr;
  const double v = p.signal / den;
  return std::isfinite(v) ? v : kInfiniteSinr;
}

/// One SINR realization of the typical link of class `cls`.
template <class Rng>
double measure_sinr(const Deployment& dep, const NetworkConfig& cfg, LinkClass cls, Mode mode, Rng& rng) {
  return sinr_from_parts(measure_parts(dep, cfg, cls, mode, rng), cfg.noise);
}

}  // namespace d2dhop::sim
