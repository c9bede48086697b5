#pragma once

// Rate-density objective and its maximization over the hopping probabilities
// and the dedicated spectrum split θ.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "d2dhop/config.hpp"
#include "d2dhop/coverage.hpp"
#include "d2dhop/kernels.hpp"
#include "d2dhop/load.hpp"
#include "d2dhop/parallel.hpp"
#include "d2dhop/rates.hpp"

namespace d2dhop {

struct ObjectiveOptions {
  NoiseModel noise = NoiseModel::InterferenceLimited;
  // Fixed thresholds; when unset the lower bounds take the supremum over β.
  std::optional<double> beta_c;
  std::optional<double> beta_d;
};

/// Rate lower bounds (R_Cl, R_Dl per type) under the optimizer's load model:
/// ρ = 1 and unclamped p_a in the congested regime.
inline std::pair<double, std::vector<double>> objective_rates(const NetworkConfig& cfg, const ObjectiveOptions& opt = {}) {
  const auto load = heavy_load_state(cfg);
  const CoverageEvaluator eval(cfg, load, opt.noise);
  auto value = [&](LinkClass cls, const std::optional<double>& fixed) {
    auto p = [&](double b) { return eval(cls, b); };
    if (fixed) return std::log2(1.0 + *fixed) * p(*fixed);
    return log_rate_supremum(p).value;
  };
  const double vc = detail::needs_cellular(cfg, load) ? value(LinkClass::Cellular, opt.beta_c) : 0.0;
  const double vd = value(LinkClass::D2D, opt.beta_d);
  return detail::apply_prefactors(cfg, load, vc, vd);
}

/// Σ_j λ_Dj·U(R_Dl_j) + λ_U·U(R_Cl).
template <class Utility>
double utility_density(const NetworkConfig& cfg, Mode mode, Utility&& u, const ObjectiveOptions& opt = {}) {
  const auto c = cfg.with_mode(mode);
  const auto [r_c, r_d] = objective_rates(c, opt);
  double s = c.lambda_u * u(r_c);
  for (std::size_t j = 0; j < r_d.size(); ++j) s += c.d2d_types[j].lambda_d * u(r_d[j]);
  return s;
}

/// Expected total rate per unit area, from the rate lower bounds.
inline double rate_density(const NetworkConfig& cfg, Mode mode, const ObjectiveOptions& opt = {}) {
  return utility_density(cfg, mode, [](double r) { return r; }, opt);
}

inline double rate_density(const NetworkConfig& cfg) { return rate_density(cfg, cfg.mode); }

struct FrequencyHopping {
  std::vector<double> p_f;
  bool spectrum_empty = false;  // θ = 0: no D2D spectrum, all zero
};

/// p_f* = min{1, b_D/(θB)}.
inline FrequencyHopping optimal_frequency_hopping(const NetworkConfig& cfg) {
  FrequencyHopping f;
  const double pool = cfg.d2d_subbands();
  f.spectrum_empty = !(pool > 0.0);
  for (const auto& t : cfg.d2d_types) f.p_f.push_back(f.spectrum_empty ? 0.0 : std::min(1.0, t.b_d / pool));
  return f;
}

enum class Method { ClosedForm, ReducedGridSearch, FullGridSearch };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::ReducedGridSearch: return "reduced_grid_search";
    default: return "full_grid_search";
  }
}

struct TimeHopping {
  std::vector<double> p_t;
  Method method = Method::ClosedForm;
  bool heavy_load = true;
  double objective = 0.0;
};

namespace detail {

/// Enumerates the full product grid {0, step, ..., 1}^M and returns the index
/// vector maximizing f; ties go to the lexicographically largest point.
template <class F>
std::vector<double> product_grid_argmax(std::size_t m, double step, F&& f, double& best_value,
                                        std::size_t max_points, unsigned workers) {
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (total > max_points / n) throw std::length_error("grid search over " + std::to_string(m) +
                                                       " dimensions exceeds the configured cost limit");
    total *= n;
  }
  std::vector<double> values(total);
  auto point = [&](std::size_t k) {
    std::vector<double> x(m);
    for (std::size_t i = m; i-- > 0;) {
      x[i] = std::min(1.0, static_cast<double>(k % n) * step);
      k /= n;
    }
    return x;
  };
  parallel_for(total, [&](std::size_t k) { values[k] = f(point(k)); }, workers);
  std::size_t best = total - 1;
  for (std::size_t k = total; k-- > 0;)
    if (values[k] > values[best]) best = k;
  best_value = values[best];
  return point(best);
}

}  // namespace detail

/// p_t*: all ones when w ≥ 1 in the congested regime; otherwise grid search
/// (step `step`) on the rate density, ties toward 1.
inline TimeHopping optimal_time_hopping(const NetworkConfig& cfg, Mode mode, double step = 0.05,
                                        std::size_t max_points = 1u << 22, unsigned workers = worker_count()) {
  const auto c = cfg.with_mode(mode);
  TimeHopping t;
  t.heavy_load = heavily_loaded(c);
  if (t.heavy_load && c.w >= 1.0) {
    t.p_t.assign(c.num_types(), 1.0);
    auto at = c;
    for (auto& ty : at.d2d_types) ty.p_t = 1.0;
    t.objective = rate_density(at, mode);
    return t;
  }
  t.method = t.heavy_load ? Method::ReducedGridSearch : Method::FullGridSearch;
  auto f = [&](const std::vector<double>& x) {
    auto at = c;
    for (std::size_t i = 0; i < x.size(); ++i) at.d2d_types[i].p_t = x[i];
    return rate_density(at, mode);
  };
  t.p_t = detail::product_grid_argmax(c.num_types(), step, f, t.objective, max_points, workers);
  return t;
}

/// Per-region aggregates of the θ objective
///   g_i(θ) = (E_i θ² + A_i θ)/(F_i θ + C_i) + D(1 − θ),   θ ∈ [lo, hi].
struct ThetaPartitionCoeffs {
  double lo = 0.0, hi = 0.0;
  double A = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 1.0;
  std::vector<std::size_t> S;  // types with p_f* = b̃_j/θ on this region
  std::vector<std::size_t> G;  // types with p_f* = 1

  double objective(double theta) const {
    const double den = F * theta + C;
    return (den > 0.0 ? (E * theta * theta + A * theta) / den : 0.0) + D * (1.0 - theta);
  }
  bool non_decreasing() const { return E >= F * D; }
  /// Stationary point (√(C(AF − EC)/(DF − E)) − C)/F, before clamping.
  double stationary_point() const { return (std::sqrt(C * (A * F - E * C) / (D * F - E)) - C) / F; }
};

struct ThetaCandidate {
  std::size_t region = 0;
  double lo = 0.0, hi = 0.0;
  double theta = 0.0;
  double objective = 0.0;       // closed-form g_i(θ)
  bool non_decreasing = false;  // E_i ≥ F_i D: the right endpoint was taken
  double literal_theta = 0.0;   // candidate with b̃'_i = 1 on such regions, clamped
};

struct PartitionSolution {
  std::vector<double> p_t_star, p_f_star;
  double theta_star = 0.0;
  double objective = 0.0;
  std::vector<ThetaCandidate> candidate_set;
  std::vector<ThetaPartitionCoeffs> coeffs;
  Method method = Method::ClosedForm;
  double beta_c = 0.0, beta_d = 0.0;
  bool heavy_load = true;
  // The winner lies in a region with E_i < F_i D, so searching only those
  // regions would have found it.
  bool decreasing_regions_suffice = false;
};

/// The thresholds the θ objective holds fixed: the lower-bound maximizers at
/// the incumbent θ with p_t = 1 and p_f = p_f*.
inline std::pair<double, double> incumbent_thresholds(const NetworkConfig& cfg) {
  auto c = cfg.with_mode(Mode::Dedicated);
  for (auto& t : c.d2d_types) t.p_t = 1.0;
  const auto pf = optimal_frequency_hopping(c);
  for (std::size_t j = 0; j < c.num_types(); ++j) c.d2d_types[j].p_f = pf.spectrum_empty ? 1.0 : pf.p_f[j];
  const auto load = heavy_load_state(c);
  const CoverageEvaluator eval(c, load, NoiseModel::InterferenceLimited);
  const double bc =
      detail::needs_cellular(c, load) ? log_rate_supremum([&](double b) { return eval.cellular(b); }).beta : 1.0;
  const double bd = log_rate_supremum([&](double b) { return eval.d2d(b); }).beta;
  return {bc, bd};
}

/// cfg at spectrum split θ with p_t = 1 and p_f = p_f*(θ).
inline NetworkConfig at_theta(const NetworkConfig& cfg, double theta) {
  auto c = cfg.with_mode(Mode::Dedicated);
  c.theta = theta;
  for (auto& t : c.d2d_types) t.p_t = 1.0;
  const auto pf = optimal_frequency_hopping(c);
  for (std::size_t j = 0; j < c.num_types(); ++j) c.d2d_types[j].p_f = pf.p_f[j];
  return c;
}

/// The θ objective evaluated directly (not through the coefficients).
inline double theta_objective(const NetworkConfig& cfg, double theta, double beta_c, double beta_d) {
  return rate_density(at_theta(cfg, theta), Mode::Dedicated, {NoiseModel::InterferenceLimited, beta_c, beta_d});
}

inline std::vector<ThetaPartitionCoeffs> theta_partition(const NetworkConfig& cfg, double beta_c, double beta_d) {
  const double a = cfg.alpha;
  const double big_b = cfg.b_total;
  const double log_d = std::log2(1.0 + beta_d);
  const double k = 2.0 * cfg.delta * cfg.delta * laplace_constant(a) * std::pow(beta_d, 2.0 / a);
  const double d = 7.0 * big_b * cfg.lambda_b / 9.0 * std::log2(1.0 + beta_c) / (2.0 * h1(beta_c, a) + 1.0);

  // Region boundaries: 0 and the distinct normalized demands below 1.
  std::vector<double> bounds{0.0};
  for (const auto& t : cfg.d2d_types)
    if (t.b_d / big_b < 1.0) bounds.push_back(t.b_d / big_b);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<ThetaPartitionCoeffs> out;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    ThetaPartitionCoeffs r;
    r.lo = bounds[i];
    r.hi = i + 1 < bounds.size() ? bounds[i + 1] : 1.0;
    double s_sum = 0.0, g_sum = 0.0;
    for (std::size_t j = 0; j < cfg.num_types(); ++j) {
      const double bt = cfg.d2d_types[j].b_d / big_b;
      if (bt <= r.lo) {
        r.S.push_back(j);
        s_sum += cfg.d2d_types[j].lambda_d * bt;
      } else {
        r.G.push_back(j);
        g_sum += cfg.d2d_types[j].lambda_d;
      }
    }
    r.A = big_b * log_d * s_sum;
    r.C = k * s_sum;
    r.D = d;
    r.E = big_b * log_d * g_sum;
    r.F = k * g_sum + 1.0;
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

/// Argmax over θ ∈ {0, step, ..., 1}; ties go to the smaller θ.
template <class F>
std::pair<double, double> theta_grid_argmax(double step, F&& f, unsigned workers) {
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
  std::vector<double> v(n);
  parallel_for(n, [&](std::size_t k) { v[k] = f(std::min(1.0, static_cast<double>(k) * step)); }, workers);
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (v[k] > v[best]) best = k;
  return {std::min(1.0, static_cast<double>(best) * step), v[best]};
}

}  // namespace detail

/// Exhaustive search over θ with the same fixed thresholds as the closed form.
inline PartitionSolution theta_grid_search(const NetworkConfig& cfg, double step = 1e-3,
                                           std::optional<std::pair<double, double>> betas = std::nullopt,
                                           unsigned workers = worker_count()) {
  const auto [bc, bd] = betas ? *betas : incumbent_thresholds(cfg);
  PartitionSolution s;
  s.method = Method::FullGridSearch;
  s.beta_c = bc;
  s.beta_d = bd;
  s.heavy_load = heavily_loaded(cfg.with_mode(Mode::Dedicated));
  std::tie(s.theta_star, s.objective) =
      detail::theta_grid_argmax(step, [&](double th) { return theta_objective(cfg, th, bc, bd); }, workers);
  const auto c = at_theta(cfg, s.theta_star);
  for (const auto& t : c.d2d_types) {
    s.p_t_star.push_back(t.p_t);
    s.p_f_star.push_back(t.p_f);
  }
  return s;
}

/// θ* from the per-region candidate set. Falls back to grid search when the
/// closed form's premises (congestion at every θ, w ≥ 1) do not hold.
inline PartitionSolution optimal_theta(const NetworkConfig& cfg, unsigned workers = worker_count()) {
  auto c0 = cfg.with_mode(Mode::Dedicated);
  c0.theta = 0.0;
  for (auto& t : c0.d2d_types) t.p_t = 1.0;
  const bool heavy = heavily_loaded(c0);  // B_C is largest at θ = 0
  const auto betas = incumbent_thresholds(cfg);
  if (!heavy || cfg.w < 1.0) {
    auto s = theta_grid_search(cfg, 1e-3, betas, workers);
    s.heavy_load = heavy;
    return s;
  }
  PartitionSolution s;
  s.method = Method::ClosedForm;
  s.heavy_load = true;
  std::tie(s.beta_c, s.beta_d) = betas;
  s.coeffs = theta_partition(cfg, s.beta_c, s.beta_d);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    const auto& r = s.coeffs[i];
    ThetaCandidate cand;
    cand.region = i;
    cand.lo = r.lo;
    cand.hi = r.hi;
    cand.non_decreasing = r.non_decreasing();
    if (cand.non_decreasing) {
      cand.theta = r.hi;
      cand.literal_theta = std::clamp(1.0, r.lo, r.hi);
    } else {
      cand.theta = std::clamp(r.stationary_point(), r.lo, r.hi);
      cand.literal_theta = cand.theta;
    }
    cand.objective = r.objective(cand.theta);
    s.candidate_set.push_back(cand);
  }
  // Strictly better only: ties keep the smaller θ (candidates ascend in θ).
  const ThetaCandidate* best = &s.candidate_set.front();
  for (const auto& cand : s.candidate_set)
    if (cand.objective > best->objective) best = &cand;
  s.theta_star = best->theta;
  s.decreasing_regions_suffice = !best->non_decreasing;
  const auto c = at_theta(cfg, s.theta_star);
  for (const auto& t : c.d2d_types) {
    s.p_t_star.push_back(t.p_t);
    s.p_f_star.push_back(t.p_f);
  }
  s.objective = theta_objective(cfg, s.theta_star, s.beta_c, s.beta_d);
  return s;
}

/// Shared network: p_t* = 1, then grid search over x_i = p_f_i ∈ [0, b_Di/B]
/// at `resolution` points per axis.
inline PartitionSolution optimize_shared(const NetworkConfig& cfg, std::size_t resolution = 51,
                                         std::size_t max_points = 1u << 20, unsigned workers = worker_count()) {
  auto c = cfg.with_mode(Mode::Shared);
  for (auto& t : c.d2d_types) t.p_t = 1.0;
  PartitionSolution s;
  s.method = Method::ReducedGridSearch;
  s.heavy_load = heavily_loaded(c);
  if (resolution < 2) throw std::invalid_argument("optimize_shared: resolution must be >= 2");
  const std::size_t m = c.num_types();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (total > max_points / resolution)
      throw std::length_error("shared grid search over " + std::to_string(m) +
                              " types exceeds the configured cost limit; raise max_points to override");
    total *= resolution;
  }
  std::vector<double> values(total);
  auto point = [&](std::size_t k) {
    std::vector<double> x(m);
    for (std::size_t i = m; i-- > 0;) {
      const double cap = std::min(1.0, c.d2d_types[i].b_d / c.b_total);
      x[i] = cap * static_cast<double>(k % resolution) / static_cast<double>(resolution - 1);
      k /= resolution;
    }
    return x;
  };
  auto eval = [&](const std::vector<double>& x) {
    auto at = c;
    for (std::size_t i = 0; i < m; ++i) at.d2d_types[i].p_f = x[i];
    return rate_density(at, Mode::Shared);
  };
  parallel_for(total, [&](std::size_t k) { values[k] = eval(point(k)); }, workers);
  std::size_t best = 0;
  for (std::size_t k = 1; k < total; ++k)
    if (values[k] > values[best]) best = k;
  s.p_f_star = point(best);
  s.p_t_star.assign(m, 1.0);
  s.objective = values[best];
  s.theta_star = 0.0;
  return s;
}

}  // namespace d2dhop
