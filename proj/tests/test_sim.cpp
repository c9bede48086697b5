#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "d2dhop/coverage.hpp"
#include "d2dhop/kernels.hpp"
#include "d2dhop/presets.hpp"
#include "d2dhop/sim/empirical.hpp"

using namespace d2dhop;
using namespace d2dhop::sim;

namespace {

NetworkConfig empty_network() {
  auto c = presets::reference();
  c.lambda_u = 0.0;
  for (auto& t : c.d2d_types) t.lambda_d = 0.0;
  return c;
}

}  // namespace

TEST(Deployment, EmptyProcesses) {
  auto c = empty_network();
  c.lambda_b = 0.0;
  SamplingOptions o;
  o.window = 1000.0;
  o.plant_link = false;
  const auto d = sample_deployment(c, 1, o);
  EXPECT_TRUE(d.bs.empty());
  EXPECT_TRUE(d.ue.empty());
  EXPECT_TRUE(d.links.empty());
  EXPECT_FALSE(d.typical_link.has_value());
}

TEST(Deployment, PoissonCounts) {
  auto c = empty_network();
  c.lambda_u = per_square(60, 500);
  SamplingOptions o;
  o.window = 5000.0;
  o.plant_link = false;
  const int n = 10000;
  double sum = 0, sum2 = 0;
  for (int s = 0; s < n; ++s) {
    const double k = static_cast<double>(sample_deployment(c, static_cast<std::uint64_t>(s), o).ue.size());
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / n, var = sum2 / n - mean * mean;
  // λA = 2.4e-4 · 5000² = 6000.
  EXPECT_NEAR(mean, 6000.0, 3.0 * std::sqrt(6000.0 / n));
  EXPECT_NEAR(var, 6000.0, 0.1 * 6000.0);
}

TEST(Deployment, PointsInsideWindow) {
  const auto c = presets::reference();
  const auto d = sample_deployment(c, 5);
  EXPECT_NEAR(d.window, 20.0 * 500.0, 1e-9);
  auto inside = [&](const Point& p) { return p.x >= 0 && p.x < d.window && p.y >= 0 && p.y < d.window; };
  for (const auto& p : d.bs) EXPECT_TRUE(inside(p));
  for (const auto& p : d.ue) EXPECT_TRUE(inside(p));
  for (const auto& l : d.links) {
    EXPECT_TRUE(inside(l.tx));
    EXPECT_TRUE(inside(l.rx));
  }
}

TEST(Deployment, WindowGuard) {
  SamplingOptions o;
  o.window = 4000.0;
  EXPECT_THROW(sample_deployment(presets::reference(), 1, o), std::invalid_argument);
}

TEST(Deployment, LinkDistanceIsRayleigh) {
  const auto c = presets::reference();
  double sum = 0;
  std::size_t n = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto d = sample_deployment(c, s);
    for (const auto& l : d.links) {
      sum += std::sqrt(torus_dist2(l.tx, l.rx, d.window));
      ++n;
    }
  }
  EXPECT_GT(n, 50000u);
  EXPECT_NEAR(sum / static_cast<double>(n), 50.0, 0.02 * 50.0);
}

TEST(Deployment, FullFrequencyHoppingOccupiesAllSubbands) {
  auto c = presets::reference();
  for (auto& t : c.d2d_types) t.p_f = 1.0;
  c.d2d_types[0].p_t = 0.5;
  const auto d = sample_deployment(c, 9);
  std::size_t active = 0, inactive = 0;
  for (const auto& l : d.links) {
    ASSERT_EQ(l.subbands.size(), 50u);
    for (auto s : l.subbands) EXPECT_EQ(s, l.active ? 1 : 0);
    (l.active ? active : inactive)++;
  }
  EXPECT_GT(active, 0u);
  EXPECT_GT(inactive, 0u);
}

TEST(Deployment, MonotoneThinningUnderCoupledUniforms) {
  auto lo = presets::reference();
  auto hi = lo;
  hi.d2d_types[0].p_f = 0.5;
  hi.d2d_types[1].p_f = 0.9;
  hi.d2d_types[0].p_t = 1.0;
  lo.d2d_types[0].p_t = 0.7;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto a = sample_deployment(lo, s), b = sample_deployment(hi, s);
    ASSERT_EQ(a.links.size(), b.links.size());
    for (std::size_t i = 0; i < a.links.size(); ++i) {
      EXPECT_EQ(a.links[i].tx.x, b.links[i].tx.x);
      for (std::size_t k = 0; k < a.links[i].subbands.size(); ++k)
        EXPECT_LE(a.links[i].subbands[k], b.links[i].subbands[k]);
    }
  }
}

TEST(Sinr, NoiseOnlySnrMean) {
  auto c = empty_network();
  Deployment d;
  d.window = 1e4;
  d.centre = {5000, 5000};
  D2DLink t;
  t.rx = d.centre;
  t.tx = {5030, 5040};
  t.active = true;
  t.subbands = {1};
  d.typical_link = t;
  std::mt19937_64 rng(42);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += measure_sinr(d, c, LinkClass::D2D, Mode::Dedicated, rng);
  const double expect = c.p_d * std::pow(50.0, -c.alpha) / c.noise;
  EXPECT_NEAR(sum / n, expect, 0.02 * expect);
}

TEST(Sinr, NoInterferersNoNoiseGivesSentinel) {
  auto c = empty_network();
  c.noise = 0.0;
  SamplingOptions o;
  o.require_bs = false;
  const auto d = sample_deployment(c, 3, o);
  std::mt19937_64 rng(1);
  EXPECT_EQ(measure_sinr(d, c, LinkClass::D2D, Mode::Dedicated, rng), kInfiniteSinr);
  auto e = ccdf_from_samples({kInfiniteSinr, kInfiniteSinr}, db_grid(-20, 40, 5));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(e.value(i), 1.0);
}

TEST(Sinr, InterferenceSourcesFollowMode) {
  const auto c = presets::reference();
  const auto d = sample_deployment(c, 4);
  std::mt19937_64 rng(2);
  auto p = measure_parts(d, c, LinkClass::Cellular, Mode::Dedicated, rng);
  EXPECT_EQ(p.d2d_interference, 0.0);
  EXPECT_GT(p.bs_interference, 0.0);
  p = measure_parts(d, c, LinkClass::D2D, Mode::Dedicated, rng);
  EXPECT_EQ(p.bs_interference, 0.0);
  EXPECT_GT(p.d2d_interference, 0.0);
  p = measure_parts(d, c, LinkClass::D2D, Mode::Shared, rng);
  EXPECT_GT(p.bs_interference, 0.0);
}

TEST(Sinr, LaplaceTransformOfSampledInterference) {
  NetworkConfig c = empty_network();
  c.lambda_b = 0.0;
  c.alpha = 4.0;
  c.p_d = 0.1;
  c.d2d_types = {{2.4e-5, 5.0, 1.0, 1.0}};
  SamplingOptions o;
  o.window = 4000.0;
  o.plant_link = false;
  o.require_bs = false;
  o.all_subbands = false;
  o.sample_ues = false;
  auto rng = replication_stream(77, 0);
  for (double s : {10.0, 3.4e8}) {
    const int n = 50000;
    double sum = 0;
    for (int r = 0; r < n; ++r) {
      const auto d = sample_deployment_with(c, rng, o);
      sum += std::exp(-s * d2dhop::sim::detail::d2d_interference(d, c, d.centre, rng));
    }
    const double expect = laplace_d2d_interference(s, 2.4e-5, 0.1, 4.0);
    EXPECT_NEAR(sum / n, expect, 0.01 * expect) << "s=" << s;
  }
}

TEST(Empirical, CcdfNonIncreasingWithPositiveHalfWidths) {
  const auto c = presets::reference(Mode::Shared);
  const auto e = empirical_coverage(c, Mode::Shared, LinkClass::D2D, db_grid(-20, 40, 40), 500, 11);
  for (std::size_t i = 1; i < e.betas.size(); ++i) EXPECT_LE(e.counts[i], e.counts[i - 1]);
  for (std::size_t i = 0; i < e.betas.size(); ++i) EXPECT_GT(e.half_width(i), 0.0);
}

namespace {
// Smallest admissible torus (10/√λ_B); enough for the short-range D2D checks.
EmpiricalOptions small_window() {
  EmpiricalOptions o;
  o.sampling.window = 5000.0;
  return o;
}
}  // namespace

TEST(Empirical, HalfWidthScalesAsInverseRootN) {
  const auto c = presets::reference();
  const auto a = empirical_coverage(c, Mode::Dedicated, LinkClass::D2D, {1.0}, 1000, 5, small_window());
  const auto b = empirical_coverage(c, Mode::Dedicated, LinkClass::D2D, {1.0}, 4000, 5, small_window());
  EXPECT_NEAR(b.half_width(0) / a.half_width(0), 0.5, 0.05);
}

TEST(Empirical, SeedDeterminesOutputRegardlessOfWorkers) {
  const auto c = presets::reference(Mode::Shared);
  EmpiricalOptions one, many;
  one.workers = 1;
  many.workers = 4;
  EXPECT_EQ(sample_sinr(c, Mode::Shared, LinkClass::Cellular, 300, 99, one),
            sample_sinr(c, Mode::Shared, LinkClass::Cellular, 300, 99, many));
  const auto r1 = empirical_rates(c, Mode::Shared, 200, 3, one), r2 = empirical_rates(c, Mode::Shared, 200, 3, many);
  EXPECT_EQ(r1.rate_d2d_per_type, r2.rate_d2d_per_type);
  EXPECT_EQ(r1.rate_cellular, r2.rate_cellular);
}

TEST(Empirical, DedicatedD2dCoverageAtUnitThreshold) {
  const auto c = presets::reference();
  const auto e = empirical_coverage(c, Mode::Dedicated, LinkClass::D2D, {1.0}, 40000, 2024, small_window());
  EXPECT_NEAR(e.value(0), coverage_d2d_dedicated(c, 1.0), 0.01);
}

TEST(Empirical, RatesMatchAnalyticSpectralEfficiency) {
  const auto c = presets::reference();
  const auto e = empirical_rates(c, Mode::Dedicated, 20000, 8, small_window());
  const auto a = rates_dedicated(c);
  EXPECT_NEAR(e.se_d2d, a.se_d2d, 0.02 * a.se_d2d);
  EXPECT_EQ(e.capped_d2d, 0u);
  EXPECT_GT(e.se_d2d_stderr, 0.0);
  // All links in D2D mode: no cellular-mode contribution.
  for (std::size_t j = 0; j < c.num_types(); ++j)
    EXPECT_NEAR(e.rate_d2d_per_type[j], std::min(c.d2d_types[j].p_f * 25.0, c.d2d_types[j].b_d) * e.se_d2d, 1e-12);
}
