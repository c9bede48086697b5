#pragma once

// Empirical SINR CCDFs and rates over independent replications. Replication r
// always uses stream (seed, r) and results are reduced in index order, so the
// output is identical for any number of workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "d2dhop/config.hpp"
#include "d2dhop/load.hpp"
#include "d2dhop/parallel.hpp"
#include "d2dhop/rates.hpp"
#include "d2dhop/sim/deployment.hpp"
#include "d2dhop/sim/sinr.hpp"
#include "d2dhop/sim/stats.hpp"

namespace d2dhop::sim {

struct EmpiricalOptions {
  SamplingOptions sampling{0.0, false, false, true, true};
  unsigned workers = 0;  // 0: worker_count()
  double max_beta = 1e15;  // rate truncation; larger SINRs are capped and counted
};

struct EmpiricalCcdf {
  LinkClass link_class = LinkClass::D2D;
  Mode mode = Mode::Dedicated;
  std::vector<double> betas;
  std::vector<std::size_t> counts;  // samples with SINR > β
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  double value(std::size_t i) const { return static_cast<double>(counts[i]) / static_cast<double>(replications); }
  std::pair<double, double> interval(std::size_t i) const {
    return wilson_interval(static_cast<double>(counts[i]), static_cast<double>(replications));
  }
  double half_width(std::size_t i) const {
    const auto [lo, hi] = interval(i);
    return 0.5 * (hi - lo);
  }
  std::vector<double> values() const {
    std::vector<double> v(betas.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(i);
    return v;
  }
};

inline unsigned resolve_workers(unsigned w) { return w == 0 ? worker_count() : w; }

/// One SINR sample per replication for the typical link of class `cls`.
inline std::vector<double> sample_sinr(const NetworkConfig& cfg, Mode mode, LinkClass cls, std::size_t replications,
                                       std::uint64_t seed, const EmpiricalOptions& opt = {}) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  const auto c = cfg.with_mode(mode);
  auto sopt = opt.sampling;
  sopt.plant_link = cls == LinkClass::D2D;
  sopt.require_bs = cls == LinkClass::Cellular;
  std::vector<double> out(replications);
  parallel_for(
      replications,
      [&](std::size_t r) {
        auto rng = replication_stream(seed, r);
        const auto dep = sample_deployment_with(c, rng, sopt);
        out[r] = measure_sinr(dep, c, cls, mode, rng);
      },
      resolve_workers(opt.workers));
  return out;
}

inline EmpiricalCcdf ccdf_from_samples(const std::vector<double>& sinr, const std::vector<double>& betas) {
  EmpiricalCcdf e;
  e.betas = betas;
  e.replications = sinr.size();
  e.counts.assign(betas.size(), 0);
  for (double s : sinr)
    for (std::size_t i = 0; i < betas.size(); ++i)
      if (s > betas[i]) ++e.counts[i];
  return e;
}

inline EmpiricalCcdf empirical_coverage(const NetworkConfig& cfg, Mode mode, LinkClass cls,
                                        const std::vector<double>& betas, std::size_t replications,
                                        std::uint64_t seed, const EmpiricalOptions& opt = {}) {
  auto e = ccdf_from_samples(sample_sinr(cfg, mode, cls, replications, seed, opt), betas);
  e.link_class = cls;
  e.mode = mode;
  e.seed = seed;
  return e;
}

struct EmpiricalRates {
  Mode mode = Mode::Dedicated;
  double rate_cellular = 0.0;
  std::vector<double> rate_d2d_per_type;
  double rate_d2d_mixture = 0.0;
  double se_cellular = 0.0;  // mean log2(1+SINR)
  double se_d2d = 0.0;
  double se_cellular_stderr = 0.0;
  double se_d2d_stderr = 0.0;
  std::size_t capped_cellular = 0;  // samples truncated at max_beta
  std::size_t capped_d2d = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

/// Mean log2(1+SINR) of both typical receivers, measured on the same
/// deployment, with the analytic resource and admission prefactors applied.
inline EmpiricalRates empirical_rates(const NetworkConfig& cfg, Mode mode, std::size_t replications, std::uint64_t seed,
                                      const EmpiricalOptions& opt = {}) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  const auto c = cfg.with_mode(mode);
  const auto load = load_state(c);
  const bool cellular = d2dhop::detail::needs_cellular(c, load);
  auto sopt = opt.sampling;
  sopt.plant_link = true;
  sopt.require_bs = cellular;
  std::vector<double> sd(replications), sc(replications, 0.0);
  parallel_for(
      replications,
      [&](std::size_t r) {
        auto rng = replication_stream(seed, r);
        const auto dep = sample_deployment_with(c, rng, sopt);
        sd[r] = measure_sinr(dep, c, LinkClass::D2D, mode, rng);
        if (cellular) sc[r] = measure_sinr(dep, c, LinkClass::Cellular, mode, rng);
      },
      resolve_workers(opt.workers));

  EmpiricalRates out;
  out.mode = mode;
  out.replications = replications;
  out.seed = seed;
  auto mean_se = [&](const std::vector<double>& v, std::size_t& capped, double& stderr_out) {
    CompensatedSum s, s2;
    for (double x : v) {
      if (x > opt.max_beta) ++capped;
      const double y = std::log2(1.0 + std::min(x, opt.max_beta));
      s.add(y);
      s2.add(y * y);
    }
    const double n = static_cast<double>(v.size());
    const double m = s.value() / n;
    const double var = n > 1 ? std::max(0.0, (s2.value() - n * m * m) / (n - 1)) : 0.0;
    stderr_out = std::sqrt(var / n);
    return m;
  };
  out.se_d2d = mean_se(sd, out.capped_d2d, out.se_d2d_stderr);
  if (cellular) out.se_cellular = mean_se(sc, out.capped_cellular, out.se_cellular_stderr);
  std::tie(out.rate_cellular, out.rate_d2d_per_type) = d2dhop::detail::apply_prefactors(c, load, out.se_cellular, out.se_d2d);
  out.rate_d2d_mixture = d2dhop::detail::mixture(c, out.rate_d2d_per_type);
  return out;
}

}  // namespace d2dhop::sim
