#pragma once

// SINR coverage probabilities P(SINR > β) of the typical D2D receiver and the
// typical cellular user, in dedicated and shared spectrum. The general
// expressions integrate over the link distance; the *_il variants are the
// independent interference-limited (σ² = 0) closed forms.

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "d2dhop/config.hpp"
#include "d2dhop/kernels.hpp"
#include "d2dhop/load.hpp"
#include "d2dhop/parallel.hpp"
#include "d2dhop/quadrature.hpp"

namespace d2dhop {

enum class NoiseModel { Thermal, InterferenceLimited };

/// Evaluates coverage for a fixed scenario and load state. The load state is
/// passed in explicitly so the optimizer can substitute the congested-regime
/// values (ρ = 1) without touching the scenario.
class CoverageEvaluator {
public:
  CoverageEvaluator(const NetworkConfig& cfg, const LoadState& load, NoiseModel noise = NoiseModel::Thermal)
      : cfg_(cfg), load_(load), noise_(noise) {
    require_alpha(cfg.alpha);
  }

  const LoadState& load() const noexcept { return load_; }
  const NetworkConfig& config() const noexcept { return cfg_; }

  double operator()(LinkClass cls, double beta) const {
    return cls == LinkClass::D2D ? d2d(beta) : cellular(beta);
  }

  double d2d(double beta) const {
    if (beta <= 0.0) return 1.0;
    if (!std::isfinite(beta)) return 0.0;
    if (cfg_.p_d <= 0.0) return 0.0;
    if (noise_ == NoiseModel::InterferenceLimited || cfg_.noise == 0.0) {
      return cfg_.mode == Mode::Dedicated ? d2d_dedicated_il(beta) : d2d_shared_il(beta);
    }
    return d2d_integral(beta);
  }

  double cellular(double beta) const {
    if (!(cfg_.lambda_b > 0.0)) throw std::domain_error("cellular coverage requires lambda_b > 0");
    if (beta <= 0.0) return 1.0;
    if (!std::isfinite(beta)) return 0.0;
    if (cfg_.p_b <= 0.0) return 0.0;
    if (noise_ == NoiseModel::InterferenceLimited || cfg_.noise == 0.0) {
      return cfg_.mode == Mode::Dedicated ? cellular_dedicated_il(beta) : cellular_shared_il(beta);
    }
    return cellular_integral(beta);
  }

  /// General integral forms, usable with σ² = 0 as well (no closed-form shortcut).
  double d2d_integral(double beta) const {
    if (beta <= 0.0) return 1.0;
    if (!std::isfinite(beta)) return 0.0;
    const double delta2 = cfg_.delta * cfg_.delta;
    if (delta2 == 0.0) return 1.0;
    const double a = cfg_.alpha;
    const double h0_term = bs_term_for_d2d(beta);
    const double d2d_rate = load_.lambda_d_tilde > 0.0
                                ? load_.lambda_d_tilde * laplace_constant(a) * std::pow(beta, 2.0 / a) * 2.0 * delta2
                                : 0.0;
    const double noise_coef = beta * cfg_.noise * std::pow(2.0 * delta2, 0.5 * a) / cfg_.p_d;
    const double scale = 1.0 + d2d_rate + h0_term * 2.0 * delta2 + std::pow(noise_coef, 2.0 / a);
    // t = v²/(2δ²): the Rayleigh distance density becomes e^{-t} dt.
    auto f = [&](double t) {
      const double v2 = 2.0 * delta2 * t;
      const double s = beta * std::pow(v2, 0.5 * a) / cfg_.p_d;
      double g = std::exp(-t - s * cfg_.noise) * laplace_d2d_interference(s, load_.lambda_d_tilde, cfg_.p_d, a);
      if (h0_term > 0.0) g *= std::exp(-h0_term * v2);
      return g;
    };
    return checked(f, scale, "d2d", beta);
  }

  double cellular_integral(double beta) const {
    if (beta <= 0.0) return 1.0;
    if (!std::isfinite(beta)) return 0.0;
    const double a = cfg_.alpha;
    const double lb_pi = cfg_.lambda_b * std::numbers::pi;
    const double bs = 2.0 * load_.rho * h1(beta, a);
    const bool shared = cfg_.mode == Mode::Shared;
    const double d2d_rate = shared && load_.lambda_d_tilde > 0.0 && cfg_.p_d > 0.0
                                ? load_.lambda_d_tilde / cfg_.lambda_b * kappa(a) *
                                      std::pow(beta * cfg_.p_d / cfg_.p_b, 2.0 / a)
                                : 0.0;
    const double noise_coef = beta * cfg_.noise / (cfg_.p_b * std::pow(lb_pi, 0.5 * a));
    const double scale = 1.0 + bs + d2d_rate + std::pow(noise_coef, 2.0 / a);
    // t = λ_B π r²: the nearest-BS distance density becomes e^{-t} dt.
    auto f = [&](double t) {
      const double r2 = t / lb_pi;
      const double s = beta * std::pow(r2, 0.5 * a) / cfg_.p_b;
      double g = std::exp(-t - s * cfg_.noise - bs * t);
      if (shared) g *= laplace_d2d_interference(s, load_.lambda_d_tilde, cfg_.p_d, a);
      return g;
    };
    return checked(f, scale, "cellular", beta);
  }

  double d2d_dedicated_il(double beta) const {
    if (beta <= 0.0) return 1.0;
    const double a = cfg_.alpha;
    return 1.0 / (1.0 + 2.0 * cfg_.delta * cfg_.delta * load_.lambda_d_tilde * laplace_constant(a) *
                            std::pow(beta, 2.0 / a));
  }

  double cellular_dedicated_il(double beta) const {
    if (beta <= 0.0) return 1.0;
    return 1.0 / (2.0 * load_.rho * h1(beta, cfg_.alpha) + 1.0);
  }

  double d2d_shared_il(double beta) const {
    if (beta <= 0.0) return 1.0;
    const double a = cfg_.alpha;
    const double delta2 = cfg_.delta * cfg_.delta;
    double denom = 2.0 * delta2 * load_.lambda_d_tilde * kappa(a) * std::numbers::pi * std::pow(beta, 2.0 / a) + 1.0;
    if (cfg_.p_b > 0.0 && load_.rho > 0.0)
      denom += 4.0 * delta2 * std::numbers::pi * load_.rho * cfg_.lambda_b * h0(beta, a, cfg_.p_d / cfg_.p_b);
    return 1.0 / denom;
  }

  double cellular_shared_il(double beta) const {
    if (beta <= 0.0) return 1.0;
    const double a = cfg_.alpha;
    double denom = 2.0 * load_.rho * h1(beta, a) + 1.0;
    if (cfg_.p_d > 0.0)
      denom += load_.lambda_d_tilde / cfg_.lambda_b * kappa(a) * std::pow(beta * cfg_.p_d / cfg_.p_b, 2.0 / a);
    return 1.0 / denom;
  }

private:
  // 2πρλ_B·H0 so that the BS Laplace factor is exp(−term·v²); 0 in dedicated mode.
  double bs_term_for_d2d(double beta) const {
    if (cfg_.mode != Mode::Shared || cfg_.p_b <= 0.0 || load_.rho <= 0.0 || cfg_.lambda_b <= 0.0) return 0.0;
    return 2.0 * std::numbers::pi * load_.rho * cfg_.lambda_b * h0(beta, cfg_.alpha, cfg_.p_d / cfg_.p_b);
  }

  // Integrates f over (0, ∞) after t = τ/scale, where scale is the total decay
  // rate of the exponent near the origin. Without it a strongly interfered
  // integrand is a spike at t ≈ 0 that the first panel never resolves.
  template <class F>
  double checked(F& f, double scale, const char* what, double beta) const {
    auto g = [&](double tau) { return f(tau / scale) / scale; };
    try {
      const auto r = integrate_to_infinity(g, 0.0);
      return std::clamp(r.value, 0.0, 1.0);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << to_string(cfg_.mode) << ' ' << what << " coverage at beta=" << beta << ": " << e.what();
      throw NumericalError(msg.str(), e.partial());
    }
  }

  NetworkConfig cfg_;
  LoadState load_;
  NoiseModel noise_;
};

// Named operations. Each evaluates its own allocation mode regardless of
// cfg.mode, with the expected-load state of that mode.

inline CoverageEvaluator evaluator_for(const NetworkConfig& cfg, Mode mode) {
  auto c = cfg.with_mode(mode);
  return CoverageEvaluator(c, load_state(c));
}

inline double coverage_d2d_dedicated(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Dedicated).d2d_integral(beta);
}
inline double coverage_d2d_dedicated_il(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Dedicated).d2d_dedicated_il(beta);
}
inline double coverage_cellular_dedicated(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Dedicated).cellular_integral(beta);
}
inline double coverage_cellular_dedicated_il(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Dedicated).cellular_dedicated_il(beta);
}
inline double coverage_d2d_shared(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Shared).d2d_integral(beta);
}
inline double coverage_d2d_shared_il(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Shared).d2d_shared_il(beta);
}
inline double coverage_cellular_shared(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Shared).cellular_integral(beta);
}
inline double coverage_cellular_shared_il(const NetworkConfig& cfg, double beta) {
  return evaluator_for(cfg, Mode::Shared).cellular_shared_il(beta);
}

/// Coverage in cfg.mode, closed form when σ² = 0.
inline double coverage(const NetworkConfig& cfg, LinkClass cls, double beta) {
  return CoverageEvaluator(cfg, load_state(cfg))(cls, beta);
}

struct CoverageCurve {
  LinkClass link_class = LinkClass::D2D;
  Mode mode = Mode::Dedicated;
  std::vector<double> betas;  // ascending, linear scale
  std::vector<double> ccdf;
};

/// n points evenly spaced in dB over [lo_db, hi_db], returned on a linear scale.
inline std::vector<double> db_grid(double lo_db, double hi_db, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double db = n == 1 ? lo_db : lo_db + (hi_db - lo_db) * static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = db_to_linear(db);
  }
  return g;
}

inline CoverageCurve coverage_curve(const NetworkConfig& cfg, LinkClass cls, const std::vector<double>& betas,
                                    unsigned workers = worker_count()) {
  CoverageCurve c;
  c.link_class = cls;
  c.mode = cfg.mode;
  c.betas = betas;
  c.ccdf.resize(betas.size());
  const CoverageEvaluator eval(cfg, load_state(cfg));
  parallel_for(betas.size(), [&](std::size_t i) { c.ccdf[i] = eval(cls, betas[i]); }, workers);
  return c;
}

}  // namespace d2dhop
