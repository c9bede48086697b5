#pragma once

// Average achievable rates and their lower bounds. Rates are in
// subband-units x bit/s/Hz; multiply by subband_bandwidth_hz for bit/s.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "d2dhop/config.hpp"
#include "d2dhop/coverage.hpp"
#include "d2dhop/load.hpp"
#include "d2dhop/quadrature.hpp"

namespace d2dhop {

/// ∫_0^∞ log2(e)/(1+β)·P(β) dβ = E[log2(1+SINR)], integrated in u with β = e^u − 1.
/// `ccdf` is the coverage function itself, not a sampled curve.
template <class P>
QuadratureResult rate_integral_result(P&& ccdf, const QuadratureOptions& opt = {}) {
  // A CCDF that has not decayed by β = 1e200 makes the integral diverge.
  const double tail = ccdf(1e200);
  if (!(tail <= 1e-9)) {
    std::ostringstream msg;
    msg << "rate integral diverges: P(SINR > 1e200) = " << tail;
    throw NumericalError(msg.str(), {});
  }
  auto f = [&](double u) {
    const double beta = std::expm1(u);
    return std::numbers::log2e * ccdf(beta);
  };
  return integrate_to_infinity(f, 0.0, opt);
}

template <class P>
double rate_integral(P&& ccdf) {
  return rate_integral_result(std::forward<P>(ccdf)).value;
}

struct Supremum {
  double beta = 0.0;
  double value = 0.0;  // log2(1+β)·P(β)
};

/// sup_β log2(1+β)·P(β): 64-point scan over log10 β ∈ [−4, 4], then
/// golden-section search between the neighbours of the best scan point.
template <class P>
Supremum log_rate_supremum(P&& ccdf) {
  constexpr int kScan = 64;
  constexpr double kLo = -4.0, kHi = 4.0;
  auto g = [&](double x) {
    const double beta = std::pow(10.0, x);
    return std::log2(1.0 + beta) * ccdf(beta);
  };
  std::array<double, kScan> xs{}, vs{};
  int best = 0;
  for (int i = 0; i < kScan; ++i) {
    xs[i] = kLo + (kHi - kLo) * i / (kScan - 1);
    vs[i] = g(xs[i]);
    if (vs[i] > vs[best]) best = i;
  }
  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, kScan - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  // Track the best point seen; P may jump, so the final midpoint can be worse.
  Supremum s{std::pow(10.0, xs[best]), vs[best]};
  auto note = [&](double x, double v) {
    if (v > s.value) s = {std::pow(10.0, x), v};
  };
  note(c, gc);
  note(d, gd);
  while (b - a > 1e-10) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
      note(c, gc);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
      note(d, gd);
    }
  }
  return s;
}

struct RateReport {
  Mode mode = Mode::Dedicated;
  double rate_cellular = 0.0;
  std::vector<double> rate_d2d_per_type;
  double rate_d2d_mixture = 0.0;
  double lb_cellular = 0.0;
  std::vector<double> lb_d2d_per_type;
  double lb_d2d_mixture = 0.0;
  double beta_c_star = 0.0;
  double beta_d_star = 0.0;
  // Spectral efficiencies E[log2(1+SINR)] behind the rates.
  double se_cellular = 0.0;
  double se_d2d = 0.0;
  LoadState load;
};

namespace detail {

/// Applies the resource/admission prefactors to per-link spectral
/// efficiencies (exact or lower bound alike). Returns (R_C, R_D per type).
inline std::pair<double, std::vector<double>> apply_prefactors(const NetworkConfig& cfg, const LoadState& load,
                                                               double se_c, double se_d) {
  const bool has_cellular = load.b_cellular > 0.0 && cfg.lambda_b > 0.0;
  const double r_c = has_cellular ? cfg.b_c * load.p_a * se_c : 0.0;
  std::vector<double> r_d(cfg.num_types());
  for (std::size_t j = 0; j < cfg.num_types(); ++j) {
    const auto& t = cfg.d2d_types[j];
    const double cap = std::min(t.p_f * cfg.d2d_subbands(), t.b_d);
    double via_bs = 0.0;
    if (t.p_t < 1.0 && has_cellular) {
      via_bs = cfg.mode == Mode::Dedicated ? t.b_d / cfg.w * (1.0 - t.p_t) * load.p_a * se_c
                                           : t.b_d / (cfg.b_c * cfg.w) * (1.0 - t.p_t) * r_c;
    }
    r_d[j] = t.p_t * cap * se_d + via_bs;
  }
  return {r_c, std::move(r_d)};
}

inline double mixture(const NetworkConfig& cfg, const std::vector<double>& per_type) {
  const double total = cfg.total_d2d_density();
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < per_type.size(); ++j) s += cfg.d2d_types[j].lambda_d / total * per_type[j];
  return s;
}

inline bool needs_cellular(const NetworkConfig& cfg, const LoadState& load) {
  return load.b_cellular > 0.0 && cfg.lambda_b > 0.0;
}

}  // namespace detail

/// Rates and lower bounds for the evaluator's scenario, mode and load state.
inline RateReport rate_report(const CoverageEvaluator& eval, bool with_lower_bounds = true) {
  const auto& cfg = eval.config();
  const auto& load = eval.load();
  RateReport r;
  r.mode = cfg.mode;
  r.load = load;
  const bool cell = detail::needs_cellular(cfg, load);
  auto pc = [&](double b) { return eval.cellular(b); };
  auto pd = [&](double b) { return eval.d2d(b); };
  r.se_cellular = cell ? rate_integral(pc) : 0.0;
  r.se_d2d = rate_integral(pd);
  std::tie(r.rate_cellular, r.rate_d2d_per_type) = detail::apply_prefactors(cfg, load, r.se_cellular, r.se_d2d);
  r.rate_d2d_mixture = detail::mixture(cfg, r.rate_d2d_per_type);
  if (with_lower_bounds) {
    Supremum sc, sd = log_rate_supremum(pd);
    if (cell) sc = log_rate_supremum(pc);
    r.beta_c_star = sc.beta;
    r.beta_d_star = sd.beta;
    std::tie(r.lb_cellular, r.lb_d2d_per_type) = detail::apply_prefactors(cfg, load, sc.value, sd.value);
    r.lb_d2d_mixture = detail::mixture(cfg, r.lb_d2d_per_type);
  }
  return r;
}

inline RateReport rates_dedicated(const NetworkConfig& cfg) {
  return rate_report(evaluator_for(cfg, Mode::Dedicated));
}

inline RateReport rates_shared(const NetworkConfig& cfg) { return rate_report(evaluator_for(cfg, Mode::Shared)); }

inline RateReport rates(const NetworkConfig& cfg) { return rate_report(evaluator_for(cfg, cfg.mode)); }

struct LowerBounds {
  double lb_cellular = 0.0;
  std::vector<double> lb_d2d_per_type;
  double beta_c_star = 0.0;
  double beta_d_star = 0.0;
};

inline LowerBounds rate_lower_bounds(const CoverageEvaluator& eval) {
  const auto& cfg = eval.config();
  Supremum sc, sd = log_rate_supremum([&](double b) { return eval.d2d(b); });
  if (detail::needs_cellular(cfg, eval.load())) sc = log_rate_supremum([&](double b) { return eval.cellular(b); });
  LowerBounds lb;
  std::tie(lb.lb_cellular, lb.lb_d2d_per_type) = detail::apply_prefactors(cfg, eval.load(), sc.value, sd.value);
  lb.beta_c_star = sc.beta;
  lb.beta_d_star = sd.beta;
  return lb;
}

inline LowerBounds rate_lower_bounds(const NetworkConfig& cfg) { return rate_lower_bounds(evaluator_for(cfg, cfg.mode)); }

/// Expected total rate per cell in bit/s: (λ_U R_C + Σ λ_Dj R_Dj)/λ_B · W_sub.
inline double total_rate_per_cell(const NetworkConfig& cfg, double r_c, const std::vector<double>& r_d) {
  double s = cfg.lambda_u * r_c;
  for (std::size_t j = 0; j < r_d.size(); ++j) s += cfg.d2d_types[j].lambda_d * r_d[j];
  return s / cfg.lambda_b * cfg.subband_bandwidth_hz;
}

inline double total_rate_per_cell(const NetworkConfig& cfg, const RateReport& r) {
  return total_rate_per_cell(cfg, r.rate_cellular, r.rate_d2d_per_type);
}

}  // namespace d2dhop
