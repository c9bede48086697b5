#pragma once

// Building blocks of the coverage expressions: κ(α), the PPP Laplace
// functional of D2D interference, and the BS interference integrals H0, H1.

#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "d2dhop/quadrature.hpp"

namespace d2dhop {

inline void require_alpha(double alpha) {
  if (!(alpha > 2.0) || !std::isfinite(alpha))
    throw std::domain_error("path-loss exponent must exceed 2 (interference functional diverges)");
}

/// κ = (2π/α) / sin(2π/α).
inline double kappa(double alpha) {
  require_alpha(alpha);
  const double x = 2.0 * std::numbers::pi / alpha;
  return x / std::sin(x);
}

/// π·κ = (2π²/α) / sin(2π/α), the constant in the D2D Laplace exponent.
inline double laplace_constant(double alpha) { return std::numbers::pi * kappa(alpha); }

/// L_I(s) = exp(−λ̃ · (2π²/α)/sin(2π/α) · (s·P_D)^{2/α}) under Rayleigh fading.
inline double laplace_d2d_interference(double s, double lambda_d_tilde, double p_d, double alpha) {
  if (s <= 0.0 || lambda_d_tilde <= 0.0 || p_d <= 0.0) return 1.0;
  return std::exp(-lambda_d_tilde * laplace_constant(alpha) * std::pow(s * p_d, 2.0 / alpha));
}

namespace detail {

struct KeyHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
  }
};

/// Exact-key memo for (β, α) → value. Readers share, writers exclude.
class PairCache {
public:
  template <class Compute>
  double get(double a, double b, Compute&& compute) {
    const auto key = std::make_pair(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
    {
      std::shared_lock lock(mutex_);
      if (auto it = map_.find(key); it != map_.end()) return it->second;
    }
    const double v = compute();
    std::unique_lock lock(mutex_);
    if (map_.size() >= kMaxEntries) map_.clear();
    map_.emplace(key, v);
    return v;
  }

private:
  static constexpr std::size_t kMaxEntries = 1u << 20;
  std::shared_mutex mutex_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, double, KeyHash> map_;
};

inline PairCache& h1_cache() {
  static PairCache cache;
  return cache;
}

inline PairCache& h0_base_cache() {
  static PairCache cache;
  return cache;
}

// Tight tolerance: these values are cached and reused by every coverage call.
inline constexpr QuadratureOptions kKernelQuadrature{1e-12, 1e-15, 4000};

/// ∫_c^∞ y/(1+y^α) dy. Beyond y = 1 the substitution y = e^s turns the
/// algebraic tail into e^{(2−α)s}/(1+e^{−αs}), which decays exponentially.
inline double power_tail_integral(double alpha, double c) {
  double head = 0.0;
  if (c < 1.0) head = integrate([alpha](double y) { return y / (1.0 + std::pow(y, alpha)); }, c, 1.0, kKernelQuadrature).value;
  const double s0 = c < 1.0 ? 0.0 : std::log(c);
  auto tail = [alpha](double s) { return std::exp((2.0 - alpha) * s) / (1.0 + std::exp(-alpha * s)); };
  return head + integrate_to_infinity(tail, s0, kKernelQuadrature).value;
}

inline double h1_uncached(double beta, double alpha) {
  // x = β^{1/α}·y maps ∫_1^∞ x/(1+x^α/β) dx onto β^{2/α}∫_c^∞ y/(1+y^α) dy,
  // c = β^{-1/α}, whose integrand no longer depends on β.
  return std::pow(beta, 2.0 / alpha) * power_tail_integral(alpha, std::pow(beta, -1.0 / alpha));
}

}  // namespace detail

/// H1(β, α) = ∫_1^∞ x / (1 + β^{-1} x^α) dx.
inline double h1(double beta, double alpha) {
  require_alpha(alpha);
  if (beta <= 0.0) return 0.0;
  if (!std::isfinite(beta)) return std::numeric_limits<double>::infinity();
  return detail::h1_cache().get(beta, alpha, [&] { return detail::h1_uncached(beta, alpha); });
}

/// H0(β, α) = ∫_0^∞ x / (1 + β^{-1}·(P_D/P_B)·x^α) dx, integrated numerically.
/// The substitution x = (β/ratio)^{1/α}·y factors out the β-dependence, so
/// only ∫_0^∞ y/(1+y^α) dy is integrated (once per α).
inline double h0(double beta, double alpha, double power_ratio) {
  require_alpha(alpha);
  if (!(power_ratio > 0.0)) throw std::domain_error("h0: power ratio P_D/P_B must be > 0");
  if (beta <= 0.0) return 0.0;
  const double base = detail::h0_base_cache().get(alpha, 0.0, [alpha] { return detail::power_tail_integral(alpha, 0.0); });
  return std::pow(beta / power_ratio, 2.0 / alpha) * base;
}

/// Closed form of H0: (π/α)/sin(2π/α) · (β/ratio)^{2/α} = (κ/2)·(β P_B/P_D)^{2/α}.
inline double h0_closed_form(double beta, double alpha, double power_ratio) {
  if (beta <= 0.0) return 0.0;
  return 0.5 * kappa(alpha) * std::pow(beta / power_ratio, 2.0 / alpha);
}

}  // namespace d2dhop
