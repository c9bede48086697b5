#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "d2dhop/quadrature.hpp"

using namespace d2dhop;

TEST(Quadrature, PolynomialIsExact) {
  const auto r = integrate([](double x) { return 3 * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 8.0, 1e-13);
  EXPECT_LE(r.abs_error, 1e-10);
}

TEST(Quadrature, EmptyIntervalIsZero) {
  EXPECT_EQ(integrate([](double) { return 1.0; }, 1.0, 1.0).value, 0.0);
}

TEST(Quadrature, ExponentialTail) {
  const auto r = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
  EXPECT_GT(r.evaluations, 0);
}

TEST(Quadrature, AlgebraicTailAgreesWithExpSinh) {
  auto f = [](double y) { return y / (1.0 + std::pow(y, 3.5)); };
  boost::math::quadrature::exp_sinh<double> es;
  const double ref = es.integrate(f, 0.7, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(integrate_to_infinity(f, 0.7).value, ref, 1e-9 * ref);
}

TEST(Quadrature, StepFunction) {
  const auto r = integrate([](double x) { return x < 0.3 ? 1.0 : 0.0; }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 0.3, 1e-8);
}

TEST(Quadrature, DivergenceRaisesWithPartialResult) {
  QuadratureOptions opt;
  opt.max_intervals = 50;
  try {
    integrate_to_infinity([](double) { return 1.0; }, 0.0, opt);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_GT(e.partial().evaluations, 0);
    EXPECT_GT(e.partial().abs_error, 0.0);
  }
}
