#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "d2dhop/coverage.hpp"
#include "d2dhop/presets.hpp"
#include "random_config.hpp"

using namespace d2dhop;

namespace {

NetworkConfig interference_only(NetworkConfig c) {
  c.noise = 0.0;
  return c;
}

// Coverage integrals written directly in the link distance, integrated by Boost.
double d2d_direct(const NetworkConfig& c, const LoadState& s, double beta) {
  const double d2 = c.delta * c.delta;
  const double bs = c.mode == Mode::Shared
                        ? 2 * std::numbers::pi * s.rho * c.lambda_b * h0_closed_form(beta, c.alpha, c.p_d / c.p_b)
                        : 0.0;
  auto f = [&](double v) {
    const double sv = beta * std::pow(v, c.alpha) / c.p_d;
    return v / d2 * std::exp(-v * v / (2 * d2)) * std::exp(-sv * c.noise) *
           laplace_d2d_interference(sv, s.lambda_d_tilde, c.p_d, c.alpha) * std::exp(-bs * v * v);
  };
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

double cellular_direct(const NetworkConfig& c, const LoadState& s, double beta) {
  const double lb = c.lambda_b;
  const double bs = 2 * std::numbers::pi * s.rho * lb * h1(beta, c.alpha);
  auto f = [&](double r) {
    const double sr = beta * std::pow(r, c.alpha) / c.p_b;
    double g = 2 * std::numbers::pi * lb * r * std::exp(-lb * std::numbers::pi * r * r) * std::exp(-sr * c.noise) *
               std::exp(-bs * r * r);
    if (c.mode == Mode::Shared) g *= laplace_d2d_interference(sr, s.lambda_d_tilde, c.p_d, c.alpha);
    return g;
  };
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

}  // namespace

TEST(Coverage, SmallThresholdGivesOne) {
  for (Mode m : {Mode::Dedicated, Mode::Shared}) {
    const auto c = presets::reference(m);
    for (auto cls : {LinkClass::D2D, LinkClass::Cellular}) {
      EXPECT_EQ(coverage(c, cls, 0.0), 1.0);
      EXPECT_NEAR(coverage(c, cls, 1e-9), 1.0, 1e-3);
    }
  }
  const auto c = presets::reference();
  EXPECT_NEAR(coverage_d2d_dedicated(c, 1e-12), 1.0, 1e-4);
  EXPECT_NEAR(coverage_cellular_shared(c, 1e-12), 1.0, 1e-4);
}

TEST(Coverage, ClosedFormExample) {
  NetworkConfig c = presets::reference();
  c.alpha = 4.0;
  c.delta = std::sqrt(1591.55);
  c.d2d_types = {{1.2e-4, 5.0, 1.0, 1.0}};
  EXPECT_NEAR(coverage_d2d_dedicated_il(c, 1.0), 1.0 / (1.0 + 2 * 1591.55 * 1.2e-4 * std::numbers::pi * std::numbers::pi / 2),
              1e-12);
  EXPECT_NEAR(coverage_d2d_dedicated_il(c, 1.0), 0.3466, 1e-4);
  EXPECT_NEAR(coverage_d2d_dedicated(interference_only(c), 1.0), coverage_d2d_dedicated_il(c, 1.0), 1e-6);
}

TEST(Coverage, NoInterferersNoNoise) {
  auto c = interference_only(presets::reference());
  c.lambda_u = 0.0;
  for (auto& t : c.d2d_types) t.lambda_d = 0.0;
  for (double b : {0.01, 1.0, 100.0}) {
    EXPECT_EQ(coverage_d2d_dedicated_il(c, b), 1.0);
    EXPECT_EQ(coverage_cellular_dedicated_il(c, b), 1.0);
    EXPECT_EQ(coverage_d2d_shared_il(c, b), 1.0);
    EXPECT_NEAR(coverage_cellular_dedicated(c, b), 1.0, 1e-9);
  }
}

TEST(Coverage, SharedWithoutD2dReducesToDedicatedCellular) {
  auto c = interference_only(presets::reference(Mode::Shared));
  for (auto& t : c.d2d_types) t.lambda_d = 0.0;
  const auto s = load_state(c);
  CoverageEvaluator shared(c, s), dedicated(c.with_mode(Mode::Dedicated), s);
  for (double b : {0.01, 1.0, 100.0}) EXPECT_NEAR(shared.cellular_shared_il(b), dedicated.cellular_dedicated_il(b), 1e-15);
}

TEST(Coverage, GeneralMatchesClosedFormWithoutNoise) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    for (Mode m : {Mode::Dedicated, Mode::Shared}) {
      const auto c = interference_only(test_support::random_config(rng, m));
      CoverageEvaluator e(c, load_state(c));
      for (double b : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        if (m == Mode::Dedicated) {
          EXPECT_NEAR(e.d2d_integral(b), e.d2d_dedicated_il(b), 1e-6);
          EXPECT_NEAR(e.cellular_integral(b), e.cellular_dedicated_il(b), 1e-6);
        } else {
          EXPECT_NEAR(e.d2d_integral(b), e.d2d_shared_il(b), 1e-6);
          EXPECT_NEAR(e.cellular_integral(b), e.cellular_shared_il(b), 1e-6);
        }
      }
    }
  }
}

TEST(Coverage, NoisyIntegralsAgreeWithDirectDistanceIntegration) {
  for (Mode m : {Mode::Dedicated, Mode::Shared}) {
    const auto c = presets::reference(m);
    const auto s = load_state(c);
    CoverageEvaluator e(c, s);
    for (double db : {-20.0, -5.0, 0.0, 10.0, 30.0}) {
      const double b = db_to_linear(db);
      EXPECT_NEAR(e.d2d(b), d2d_direct(c, s, b), 1e-8) << to_string(m) << " " << db;
      EXPECT_NEAR(e.cellular(b), cellular_direct(c, s, b), 1e-8) << to_string(m) << " " << db;
    }
  }
}

TEST(Coverage, NonIncreasingInBeta) {
  for (Mode m : {Mode::Dedicated, Mode::Shared}) {
    const auto c = presets::reference(m);
    for (auto cls : {LinkClass::D2D, LinkClass::Cellular}) {
      const auto curve = coverage_curve(c, cls, db_grid(-20, 40, 40), 1);
      for (std::size_t i = 1; i < curve.ccdf.size(); ++i) EXPECT_LE(curve.ccdf[i], curve.ccdf[i - 1] + 1e-12);
      for (double v : curve.ccdf) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Coverage, SharedBelowDedicatedAtMatchedLoad) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const auto c = test_support::random_config(rng, Mode::Dedicated);
    const auto s = load_state(c);
    CoverageEvaluator ded(c, s), sh(c.with_mode(Mode::Shared), s);
    for (double b : {0.1, 1.0, 10.0}) {
      EXPECT_LE(sh.d2d(b), ded.d2d(b) + 1e-12);
      EXPECT_LE(sh.cellular(b), ded.cellular(b) + 1e-12);
    }
  }
}

TEST(Coverage, SharedMonotoneInHoppingProbabilities) {
  const auto base = presets::reference(Mode::Shared);
  for (std::size_t i = 0; i < base.num_types(); ++i) {
    for (bool time : {true, false}) {
      double prev_d = 2, prev_c = 2;
      for (double p = 0.0; p <= 1.0001; p += 0.1) {
        auto c = base;
        (time ? c.d2d_types[i].p_t : c.d2d_types[i].p_f) = p;
        const double d = coverage(c, LinkClass::D2D, 1.0), cc = coverage(c, LinkClass::Cellular, 1.0);
        EXPECT_LE(d, prev_d + 1e-12);
        EXPECT_LE(cc, prev_c + 1e-12);
        prev_d = d;
        prev_c = cc;
      }
    }
  }
}

TEST(Coverage, NamedOperationsUseTheirOwnMode) {
  const auto c = presets::reference(Mode::Dedicated);
  EXPECT_EQ(coverage_d2d_shared_il(c, 1.0), coverage(interference_only(c.with_mode(Mode::Shared)), LinkClass::D2D, 1.0));
}

TEST(Coverage, CellularNeedsBaseStations) {
  auto c = presets::reference();
  c.lambda_b = 0.0;
  c.lambda_u = 0.0;
  EXPECT_THROW(coverage(c, LinkClass::Cellular, 1.0), std::domain_error);
}

TEST(Coverage, GridIsAscendingInDb) {
  const auto g = db_grid(-20, 40, 40);
  ASSERT_EQ(g.size(), 40u);
  EXPECT_NEAR(g.front(), 0.01, 1e-15);
  EXPECT_NEAR(g.back(), 1e4, 1e-9);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(Coverage, ParallelCurveIsIdentical) {
  const auto c = presets::reference(Mode::Shared);
  const auto a = coverage_curve(c, LinkClass::D2D, db_grid(-20, 40, 40), 1);
  const auto b = coverage_curve(c, LinkClass::D2D, db_grid(-20, 40, 40), 4);
  EXPECT_EQ(a.ccdf, b.ccdf);
}
