#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "efron/error.hpp"
#include "efron/quadrature.hpp"

using namespace efron;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

TEST(Quadrature, NormalOverRealLine) {
  const auto r = integrate(normal_pdf, Interval{-kInf, kInf});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Quadrature, ExponentialOnHalfLine) {
  const auto r = integrate([](double x) { return std::exp(-x); }, Interval{0.0, kInf});
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Quadrature, LogisticOverRealLine) {
  const auto r = integrate(
      [](double x) {
        const double e = std::exp(-std::abs(x));
        return e / ((1.0 + e) * (1.0 + e));
      },
      Interval{-kInf, kInf});
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Quadrature, LowerInfiniteEnd) {
  const auto r = integrate([](double x) { return std::exp(x); }, Interval{-kInf, 0.0});
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Quadrature, ConvergedErrorIsHonest) {
  const QuadConfig cfg;
  const auto r = integrate([](double x) { return std::sin(x) * std::sin(x); }, Interval{0.0, 3.0}, cfg);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.error_estimate, std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value)));
  EXPECT_NEAR(r.value, 1.5 - std::sin(6.0) / 4.0, 1e-10);
}

TEST(Quadrature, UptoUniform) {
  const auto r = integrate_upto([](double) { return 1.0; }, 0.25, Interval{0.0, 1.0});
  EXPECT_NEAR(r.value, 0.25, 1e-12);
}

TEST(Quadrature, UptoExponential) {
  const auto r = integrate_upto([](double x) { return std::exp(-x); }, 1.0, Interval{0.0, kInf});
  EXPECT_NEAR(r.value, 1.0 - std::exp(-1.0), 1e-10);
}

TEST(Quadrature, UptoLowerEndIsZero) {
  const auto r = integrate_upto([](double) { return 1.0; }, 0.0, Interval{0.0, 1.0});
  EXPECT_EQ(r.value, 0.0);
}

TEST(Quadrature, Linearity) {
  auto f = [](double x) { return std::exp(-x * x); };
  auto g = [](double x) { return 1.0 / (1.0 + x * x); };
  const Interval d{-kInf, kInf};
  const double lhs = integrate([&](double x) { return 2.0 * f(x) - 3.0 * g(x); }, d).value;
  const double rhs = 2.0 * integrate(f, d).value - 3.0 * integrate(g, d).value;
  EXPECT_NEAR(lhs, rhs, 1e-8);
  EXPECT_NEAR(rhs, 2.0 * std::sqrt(std::numbers::pi) - 3.0 * std::numbers::pi, 1e-8);
}

TEST(Quadrature, IntervalAdditivity) {
  auto f = [](double x) { return std::exp(-std::abs(x)) * std::cos(x); };
  const double whole = integrate(f, Interval{-2.0, 5.0}).value;
  const double parts = integrate(f, Interval{-2.0, 0.7}).value + integrate(f, Interval{0.7, 5.0}).value;
  EXPECT_NEAR(whole, parts, 1e-10);
}

TEST(Quadrature, KinkAsSplitPoint) {
  const double split = 0.3;
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, Interval{-1.0, 1.0}, {},
                           std::span<const double>(&split, 1));
  EXPECT_NEAR(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-12);
}

TEST(Quadrature, EndpointSingularityTolerated) {
  // NaN at the open endpoint is never sampled.
  const auto r = integrate([](double x) { return x == 0.0 ? std::nan("") : 1.0 / std::sqrt(x); }, Interval{0.0, 1.0});
  EXPECT_NEAR(r.value, 2.0, 1e-7);
}

TEST(Quadrature, InteriorNanThrows) {
  try {
    integrate([](double x) { return x > 0.5 ? std::nan("") : 1.0; }, Interval{0.0, 1.0});
    FAIL() << "expected NonFiniteEvaluation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteEvaluation);
  }
}

TEST(Quadrature, BudgetExhaustionIsReported) {
  QuadConfig cfg;
  cfg.max_subdivisions = 3;
  cfg.rel_tol = 1e-14;
  cfg.abs_tol = 1e-300;
  const auto r = integrate([](double x) { return std::sin(1.0 / x); }, Interval{1e-4, 1.0}, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(integrate_value([](double x) { return std::sin(1.0 / x); }, Interval{1e-4, 1.0}, cfg, {}, "osc"),
               Error);
}

TEST(Quadrature, BadConfigRejected) {
  EXPECT_THROW(validate(QuadConfig{0.0, 1e-12, 10}), Error);
  EXPECT_THROW(validate(QuadConfig{1e-9, 1e-12, 0}), Error);
  EXPECT_THROW(make_interval(1.0, 1.0), Error);
}

TEST(FiniteDiff, FirstDerivativeOfSquare) { EXPECT_NEAR(finite_diff([](double x) { return x * x; }, 3.0, 1), 6.0, 1e-6); }

TEST(FiniteDiff, SecondDerivativeOfSquare) {
  EXPECT_NEAR(finite_diff([](double x) { return x * x; }, 0.0, 2), 2.0, 1e-4);
}

TEST(FiniteDiff, LogisticPotentialCurvature) {
  auto phi = [](double x) { return x + 2.0 * std::log1p(std::exp(-x)); };
  EXPECT_NEAR(finite_diff(phi, 0.0, 2), 0.5, 1e-4);
}

TEST(FiniteDiff, RelativeAccuracyOnSmoothFunctions) {
  for (double x : {-3.0, -0.5, 0.2, 1.7, 12.0}) {
    const double e = finite_diff([](double t) { return std::exp(0.3 * t); }, x, 1);
    EXPECT_NEAR(e, 0.3 * std::exp(0.3 * x), 1e-5 * 0.3 * std::exp(0.3 * x));
    const double p = finite_diff([](double t) { return t * t * t - 2.0 * t; }, x, 1);
    EXPECT_NEAR(p, 3.0 * x * x - 2.0, 1e-5 * std::max(1.0, std::abs(3.0 * x * x - 2.0)));
  }
}

TEST(FiniteDiff, OrderOutOfRangeRejected) { EXPECT_THROW(finite_diff([](double x) { return x; }, 0.0, 3), Error); }
