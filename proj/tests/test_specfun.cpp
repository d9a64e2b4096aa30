#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ehrelay/specfun.hpp"

namespace ehrelay {
namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, truncated where the
// integrand is below 1e-300.
double bessel_k_by_definition(int nu, double x) {
  const double upper = std::acosh(700.0 / x + 1.0);
  QuadratureSettings s;
  s.rel_tol = 1e-13;
  s.abs_tol = 1e-300;
  return integrate([&](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); }, 0.0,
                   upper, s)
      .value;
}

TEST(Bessel, FrozenValues) {
  EXPECT_LE(rel_err(bessel_k0(1.0), 0.42102443824070834), 1e-12);
  EXPECT_LE(rel_err(bessel_k0(10.0), 1.7780062316167652e-5), 1e-12);
  EXPECT_LE(rel_err(bessel_k1(1.0), 0.6019072301972346), 1e-12);
  EXPECT_LE(rel_err(bessel_k1(5.0), 0.004044613445452164), 1e-12);
}

TEST(Bessel, SmallArgumentLimits) {
  EXPECT_GT(bessel_k0(1e-6), 13.0);
  const double x = 1e-6;
  EXPECT_NEAR(bessel_k0(x), -std::log(x / 2) - std::numbers::egamma, 1e-9);
  EXPECT_NEAR(1e-8 * bessel_k1(1e-8), 1.0, 1e-12);
  EXPECT_EQ(x_bessel_k1(0.0), 1.0);
}

TEST(Bessel, RejectsNonPositive) {
  EXPECT_THROW(bessel_k0(0.0), ParameterError);
  EXPECT_THROW(bessel_k1(-1.0), ParameterError);
}

TEST(Bessel, UnderflowsToZero) {
  EXPECT_EQ(bessel_k0(800.0), 0.0);
  EXPECT_EQ(bessel_k1(800.0), 0.0);
  EXPECT_GT(bessel_k1(700.0), 0.0);
}

TEST(Bessel, MatchesStandardLibraryAcrossRange) {
  for (double x = 1e-8; x < 700.0; x *= 1.37) {
    EXPECT_LE(rel_err(bessel_k0(x), std::cyl_bessel_k(0.0, x)), 1e-12) << "x=" << x;
    EXPECT_LE(rel_err(bessel_k1(x), std::cyl_bessel_k(1.0, x)), 1e-12) << "x=" << x;
  }
}

TEST(Bessel, MatchesIntegralDefinitionAroundCrossover) {
  for (double x : {0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 8.0, 30.0}) {
    EXPECT_LE(rel_err(bessel_k0(x), bessel_k_by_definition(0, x)), 1e-11) << "x=" << x;
    EXPECT_LE(rel_err(bessel_k1(x), bessel_k_by_definition(1, x)), 1e-11) << "x=" << x;
  }
}

TEST(Bessel, PositiveAndStrictlyDecreasing) {
  double prev0 = bessel_k0(1e-4), prev1 = bessel_k1(1e-4);
  for (double x = 2e-4; x < 600.0; x *= 1.1) {
    const double k0 = bessel_k0(x), k1 = bessel_k1(x);
    EXPECT_GT(k0, 0.0);
    EXPECT_LT(k0, prev0);
    EXPECT_LT(k1, prev1);
    prev0 = k0;
    prev1 = k1;
  }
}

TEST(Bessel, DerivativeIdentity) {
  // d/dx (x K1(x)) = -x K0(x)
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    const double h = 1e-5 * x;
    const double fd = (x_bessel_k1(x + h) - x_bessel_k1(x - h)) / (2 * h);
    EXPECT_LE(rel_err(fd, -x * bessel_k0(x)), 1e-6) << "x=" << x;
  }
}

TEST(Quadrature, ExponentialOnHalfLine) {
  const auto r = integrate_semi_infinite([](double z) { return std::exp(-z); }, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-8);
}

TEST(Quadrature, Arctangent) {
  const auto r = integrate_semi_infinite([](double z) { return 1.0 / (1.0 + z * z); }, 0.0);
  EXPECT_NEAR(r.value, std::numbers::pi / 2, 1e-8);
}

TEST(Quadrature, BesselIntegralIdentity) {
  // int_0^inf e^{-beta/(4x) - gamma x} dx = sqrt(beta/gamma) K1(sqrt(beta gamma)), beta=4, gamma=1
  const auto r = integrate_semi_infinite(
      [](double z) { return clamped_exp(-z - 1.0 / z); }, 0.0);
  EXPECT_NEAR(r.value, 2.0 * bessel_k1(2.0), 1e-9);
  EXPECT_NEAR(r.value, 0.2797318, 1e-7);
}

TEST(Quadrature, ClampedExponentAtEndpointIsZeroNotNaN) {
  EXPECT_EQ(clamped_exp(-1e308), 0.0);
  EXPECT_EQ(clamped_exp(-INFINITY), 0.0);
  EXPECT_EQ(clamped_exp(NAN), 0.0);
  EXPECT_EQ(clamped_exp(-746.0), 0.0);
}

TEST(Quadrature, Linearity) {
  auto f = [](double z) { return std::exp(-z) * std::cos(z); };
  auto g = [](double z) { return 1.0 / ((1.0 + z) * (1.0 + z)); };
  const auto rf = integrate_semi_infinite(f, 0.0);
  const auto rg = integrate_semi_infinite(g, 0.0);
  const auto rc = integrate_semi_infinite([&](double z) { return 2.5 * f(z) - 0.7 * g(z); }, 0.0);
  EXPECT_NEAR(rc.value, 2.5 * rf.value - 0.7 * rg.value,
              rc.abs_error + 2.5 * rf.abs_error + 0.7 * rg.abs_error + 1e-12);
}

TEST(Quadrature, SplitInvariance) {
  auto f = [](double z) { return std::exp(-0.3 * z) / (1.0 + z); };
  const auto whole = integrate_semi_infinite(f, 0.0);
  for (double split : {0.1, 1.0, 7.5, 40.0}) {
    const auto left = integrate(f, 0.0, split);
    const auto right = integrate_semi_infinite(f, split);
    EXPECT_LE(rel_err(left.value + right.value, whole.value), 1e-8) << "split=" << split;
  }
}

TEST(Quadrature, Deterministic) {
  auto f = [](double z) { return std::exp(-z * z) * std::log1p(z); };
  const auto a = integrate_semi_infinite(f, 0.0);
  const auto b = integrate_semi_infinite(f, 0.0);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Quadrature, ReportsNonConvergenceWithPartialValue) {
  QuadratureSettings s;
  s.max_subdivisions = 3;
  s.rel_tol = 1e-14;
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, s);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.abs_error, 0.0);
  EXPECT_NEAR(r.value, 2.0, 0.2);
}

TEST(Quadrature, RejectsBadSettings) {
  QuadratureSettings s;
  s.rel_tol = 0.0;
  EXPECT_THROW(integrate([](double) { return 1.0; }, 0.0, 1.0, s), ParameterError);
  s = {};
  s.max_subdivisions = 0;
  EXPECT_THROW(integrate([](double) { return 1.0; }, 0.0, 1.0, s), ParameterError);
}

}  // namespace
}  // namespace ehrelay
