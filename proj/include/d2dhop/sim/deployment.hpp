#pragma once

// One sampled realization of the network on a square torus.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "d2dhop/config.hpp"
#include "d2dhop/sim/stats.hpp"

namespace d2dhop::sim {

struct Point {
  double x = 0.0, y = 0.0;
};

struct D2DLink {
  Point tx, rx;
  std::size_t type = 0;
  bool active = false;                 // D2D mode in this slot
  bool on_reference = false;           // occupies the reference subband (index 0)
  std::vector<std::uint8_t> subbands;  // occupancy per subband; empty under lean sampling
};

struct Deployment {
  double window = 0.0;  // side length, m
  std::vector<Point> bs;
  std::vector<double> bs_uniform;  // BS b transmits on the reference subband iff bs_uniform[b] < ρ
  std::vector<Point> ue;
  std::vector<D2DLink> links;
  std::optional<D2DLink> typical_link;  // receiver at the window centre
  Point centre;                         // typical UE / typical D2D receiver location
  bool receivers_sampled = true;        // false: interferer rx positions skipped (rx == tx)
  std::uint64_t seed = 0;
  int bs_retries = 0;
};

struct SamplingOptions {
  double window = 0.0;        // 0: 20/√λ_B
  bool sample_ues = true;     // UE positions do not enter any SINR; skip for speed
  // false (lean): draw only the reference-subband occupancy and skip the
  // receivers of interfering links, neither of which enters any SINR.
  bool all_subbands = true;
  bool plant_link = true;
  bool require_bs = true;     // resample when no BS falls in the window
};

inline double default_window(const NetworkConfig& cfg) {
  if (!(cfg.lambda_b > 0.0)) throw std::invalid_argument("default window needs lambda_b > 0");
  return 20.0 / std::sqrt(cfg.lambda_b);
}

/// Squared toroidal distance.
inline double torus_dist2(const Point& a, const Point& b, double w) {
  double dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
  dx = std::min(dx, w - dx);
  dy = std::min(dy, w - dy);
  return dx * dx + dy * dy;
}

inline double wrap(double v, double w) {
  v = std::fmod(v, w);
  return v < 0.0 ? v + w : v;
}

namespace detail {

template <class Rng>
std::vector<Point> poisson_points(Rng& rng, double density, double w) {
  std::vector<Point> pts;
  if (density <= 0.0) return pts;
  std::poisson_distribution<long long> count(density * w * w);
  const long long n = count(rng);
  pts.resize(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = w * uniform01(rng);
    p.y = w * uniform01(rng);
  }
  return pts;
}

// Time/frequency hopping marks. The uniforms are drawn whatever the
// probabilities are, so runs with equal seeds are coupled across p_t, p_f.
template <class Rng>
void draw_marks(Rng& rng, D2DLink& l, const D2DTypeConfig& t, std::size_t n_subbands, bool keep_subbands) {
  l.active = uniform01(rng) < t.p_t;
  if (keep_subbands) {
    l.subbands.resize(n_subbands);
    for (auto& s : l.subbands) s = (uniform01(rng) < t.p_f && l.active) ? 1 : 0;
    l.on_reference = l.subbands[0] != 0;
  } else {
    l.on_reference = uniform01(rng) < t.p_f && l.active;
  }
}

}  // namespace detail

/// Samples BSs, UEs and per-type D2D links as independent PPPs on the torus,
/// plus a typical active link (occupying the reference subband) whose
/// receiver sits at the centre.
template <class Rng>
Deployment sample_deployment_with(const NetworkConfig& cfg, Rng& rng, const SamplingOptions& opt = {}) {
  Deployment d;
  d.window = opt.window > 0.0 ? opt.window : default_window(cfg);
  if (cfg.lambda_b > 0.0 && d.window < 10.0 / std::sqrt(cfg.lambda_b))
    throw std::invalid_argument("simulation window must be at least 10/sqrt(lambda_b)");
  d.centre = {0.5 * d.window, 0.5 * d.window};
  d.receivers_sampled = opt.all_subbands;
  const double w = d.window;

  for (;;) {
    d.bs = detail::poisson_points(rng, cfg.lambda_b, w);
    if (!d.bs.empty() || !opt.require_bs || cfg.lambda_b <= 0.0) break;
    if (++d.bs_retries > 1000) throw std::runtime_error("no base station sampled after 1000 retries");
  }
  d.bs_uniform.resize(d.bs.size());
  for (auto& u : d.bs_uniform) u = uniform01(rng);
  if (opt.sample_ues) d.ue = detail::poisson_points(rng, cfg.lambda_u, w);

  const std::size_t n_sub = static_cast<std::size_t>(std::llround(cfg.b_total));
  std::normal_distribution<double> offset(0.0, cfg.delta);
  d.links.reserve(static_cast<std::size_t>(1.2 * cfg.total_d2d_density() * w * w) + 16);
  for (std::size_t i = 0; i < cfg.num_types(); ++i) {
    const auto& t = cfg.d2d_types[i];
    for (const auto& tx : detail::poisson_points(rng, t.lambda_d, w)) {
      D2DLink l;
      l.type = i;
      l.tx = tx;
      l.rx = tx;
      if (d.receivers_sampled) {
        const double dx = offset(rng), dy = offset(rng);
        l.rx = {wrap(tx.x + dx, w), wrap(tx.y + dy, w)};
      }
      detail::draw_marks(rng, l, t, n_sub, opt.all_subbands);
      d.links.push_back(std::move(l));
    }
  }
  if (opt.plant_link) {
    D2DLink l;
    l.rx = d.centre;
    const double dx = offset(rng), dy = offset(rng);
    l.tx = {wrap(l.rx.x + dx, w), wrap(l.rx.y + dy, w)};
    l.active = true;
    l.on_reference = true;
    if (opt.all_subbands) {
      l.subbands.assign(n_sub, 0);
      l.subbands[0] = 1;
    }
    d.typical_link = l;
  }
  return d;
}

inline Deployment sample_deployment(const NetworkConfig& cfg, std::uint64_t seed, const SamplingOptions& opt = {}) {
  auto rng = replication_stream(seed, 0);
  auto d = sample_deployment_with(cfg, rng, opt);
  d.seed = seed;
  return d;
}

}  // namespace d2dhop::sim
