#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "efron/error.hpp"
#include "efron/identities.hpp"

using namespace efron;

namespace {

const RealFn kOne = [](double) { return 1.0; };
const RealFn kId = [](double x) { return x; };

std::vector<double> grid41(const Measure1D& m) {
  std::vector<double> xs;
  for (int i = 0; i < 41; ++i) xs.push_back(m.quantile(0.005 + 0.99 * i / 40.0));
  return xs;
}

}  // namespace

TEST(CovKernelForm, Examples) {
  EXPECT_NEAR(cov_kernel_form(Measure1D(normal_density(0.0, 1.0)), kOne, kOne), 1.0, 1e-8);
  EXPECT_NEAR(cov_kernel_form(Measure1D(uniform_density(0.0, 1.0)), kOne, kOne), 1.0 / 12.0, 1e-10);
  const Measure1D l(logistic_density());
  EXPECT_NEAR(cov_kernel_form(l, kOne, l.density().d2phi), 1.0, 1e-8);
}

TEST(CovDirect, Examples) {
  EXPECT_NEAR(cov_direct(Measure1D(normal_density(0.0, 1.0)), kId, kId), 1.0, 1e-10);
  EXPECT_NEAR(cov_direct(Measure1D(logistic_density()), [](double) { return 3.0; }, kId), 0.0, 1e-12);
  EXPECT_NEAR(cov_direct(Measure1D(uniform_density(0.0, 1.0)), kId, [](double x) { return x * x; }), 1.0 / 12.0, 1e-12);
}

TEST(CovKernelForm, MatchesDirectAndIsFkgPositive) {
  const RealFn th = [](double x) { return std::tanh(x); };
  const RealFn dth = [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); };
  const RealFn at = [](double x) { return std::atan(x); };
  const RealFn dat = [](double x) { return 1.0 / (1.0 + x * x); };
  for (const auto& d : {normal_density(0.0, 1.0), logistic_density(), gamma_density(2.0), cauchy_density(),
                        bridge_density(0.7)}) {
    const Measure1D m(d);
    const double k1 = cov_kernel_form(m, dth, dat);
    EXPECT_NEAR(k1, cov_direct(m, th, at), 1e-6) << d.name;
    EXPECT_GE(k1, -1e-9);
    const double k2 = cov_kernel_form(m, dth, [](double x) { return -2.0 * x * std::exp(-x * x); });
    EXPECT_NEAR(k2, cov_direct(m, th, [](double x) { return std::exp(-x * x); }), 1e-6) << d.name;
  }
}

TEST(IndicatorIdentity, UniformHalf) {
  const auto r = indicator_identity(Measure1D(uniform_density(0.0, 1.0)), 0.5, kId, kOne);
  EXPECT_NEAR(r.lhs, 0.125, 1e-12);
  EXPECT_NEAR(r.rhs, 0.125, 1e-12);
  // E[X | X > 1/2] - E[X] = 1/4.
  EXPECT_NEAR(r.mean_residual_life(), 0.25, 1e-12);
}

TEST(IndicatorIdentity, ConstantB) {
  const auto r = indicator_identity(Measure1D(logistic_density()), 0.3, [](double) { return 2.0; },
                                    [](double) { return 0.0; });
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
  EXPECT_NEAR(r.rhs, 0.0, 1e-12);
}

TEST(IndicatorIdentity, NormalAtZero) {
  // lhs = -∫_{x<=0} x pdf = pdf(0); rhs = ∫ K(0, y) dy, evaluated in closed form as well.
  const auto r = indicator_identity(Measure1D(normal_density(0.0, 1.0)), 0.0, kId, kOne);
  const double pdf0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(r.lhs, pdf0, 1e-10);
  EXPECT_NEAR(r.rhs, pdf0, 1e-10);
}

TEST(IndicatorIdentity, LaplaceStieltjesForm) {
  // b = phi' = sign: b' vanishes a.e. with a jump of 2 at 0, and lhs = f(z).
  const Measure1D m(laplace_density());
  const auto& d = m.density();
  for (double z : {-2.0, -0.5, 0.25, 1.5}) {
    const auto r = indicator_identity(m, z, d.dphi, d.d2phi, d.kinks, d.kink_points());
    EXPECT_NEAR(r.lhs, 0.5 * std::exp(-std::abs(z)), 1e-9);
    EXPECT_NEAR(r.rhs, r.lhs, 1e-9);
  }
}

TEST(IndicatorIdentity, NonIntegrableBIsAViolation) {
  try {
    indicator_identity(Measure1D(cauchy_density()), 0.0, kId, kOne);
    FAIL() << "expected HypothesisViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolation);
  }
}

TEST(IndicatorIdentity, TailSurrogateFlagged) {
  const Measure1D n(normal_density(0.0, 1.0));
  const auto ok = indicator_identity(n, 0.2, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
  EXPECT_TRUE(ok.tail_condition_ok);
  EXPECT_NEAR(ok.lhs, ok.rhs, 1e-9);
  // On the Cauchy law b' = (1 + |x|)^(-1/2) makes ∫ |b'| sqrt(F(1-F)) diverge
  // logarithmically while b stays integrable.
  const Measure1D c(cauchy_density());
  const auto flagged = indicator_identity(
      c, 0.2, [](double x) { return std::copysign(2.0 * (std::sqrt(1.0 + std::abs(x)) - 1.0), x); },
      [](double x) { return 1.0 / std::sqrt(1.0 + std::abs(x)); }, {}, std::vector<double>{0.0});
  EXPECT_FALSE(flagged.tail_condition_ok);
  EXPECT_FALSE(flagged.note.empty());
}

TEST(DensityRecovery, Examples) {
  EXPECT_NEAR(density_recovery(Measure1D(logistic_density()), 0.0), 0.25, 1e-9);
  EXPECT_NEAR(density_recovery(Measure1D(cauchy_density()), 0.0), 1.0 / std::numbers::pi, 1e-9);
  EXPECT_NEAR(density_recovery(Measure1D(gamma_density(2.0)), 1.0), std::exp(-1.0), 1e-9);
}

TEST(DensityRecovery, Grids) {
  for (const auto& d : {logistic_density(), cauchy_density(), gamma_density(1.5), gamma_density(2.0),
                        gamma_density(3.0), bridge_density(0.3), bridge_density(0.7)}) {
    const Measure1D m(d);
    for (double x : grid41(m)) EXPECT_NEAR(density_recovery(m, x), d.pdf(x), 1e-6) << d.name << " x=" << x;
  }
}

TEST(DensityRecovery, LaplaceAwayFromKink) {
  const Measure1D m(laplace_density());
  for (double x : {-3.0, -1.0, -0.2, 0.2, 1.0, 3.0}) EXPECT_NEAR(density_recovery(m, x), 0.5 * std::exp(-std::abs(x)), 1e-9);
}

TEST(DensityRecovery, LogisticClosedForm) {
  const Measure1D m(logistic_density());
  for (double x : {-4.0, -1.0, 0.5, 2.0}) {
    const double F = 1.0 / (1.0 + std::exp(-x));
    EXPECT_NEAR(density_recovery(m, x), F * (1.0 - F), 1e-9);
  }
}

TEST(DensityRecovery, HypothesisViolations) {
  for (const auto& d : {exponential_density(), gamma_density(1.0), gamma_density(0.5), uniform_density(0.0, 1.0)}) {
    try {
      density_recovery(Measure1D(d), 0.7);
      FAIL() << d.name << ": expected HypothesisViolation";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::HypothesisViolation) << d.name;
    }
  }
  EXPECT_TRUE(density_recovery_violation(Measure1D(gamma_density(1.5))).empty());
}
