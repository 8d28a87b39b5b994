#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "efron/bivariate.hpp"
#include "efron/density.hpp"
#include "efron/error.hpp"
#include "efron/joint_model.hpp"
#include "efron/measure.hpp"

using namespace efron;

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::vector<Density1D> battery() {
  return {normal_density(0.0, 1.0), logistic_density(), gamma_density(2.0), cauchy_density(), bridge_density(0.7),
          laplace_density(),        uniform_density(0.0, 1.0)};
}

}  // namespace

TEST(Density, BuiltinsNormalise) {
  for (const auto& d : battery()) EXPECT_NO_THROW(validate(d)) << d.name;
  EXPECT_NO_THROW(validate(gamma_density(0.5)));
  EXPECT_NO_THROW(validate(exponential_density()));
  EXPECT_NO_THROW(validate(bridge_density(0.3)));
}

TEST(Density, ParseByName) {
  EXPECT_EQ(parse_density("normal").name, "normal(0,1)");
  EXPECT_NEAR(parse_density("normal(1,4)").pdf(1.0), 1.0 / std::sqrt(8.0 * std::numbers::pi), 1e-14);
  EXPECT_NEAR(parse_density("gamma(2)").pdf(1.0), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(parse_density("uniform(0,2)").pdf(0.5), 0.5, 1e-14);
  EXPECT_NEAR(parse_density("exponential").pdf(0.0 + 1e-300), 1.0, 1e-14);
  EXPECT_NO_THROW(parse_density("laplace"));
  EXPECT_NO_THROW(parse_density("bridge(0.3)"));
  EXPECT_THROW(parse_density("gamma(-1)"), Error);
  EXPECT_THROW(parse_density("weibull(2)"), Error);
  EXPECT_THROW(parse_density("uniform(1,0)"), Error);
}

TEST(Density, LogConcaveHintIsChecked) {
  auto d = cauchy_density();
  d.log_concave_hint = true;
  EXPECT_THROW(validate(d), Error);
  EXPECT_TRUE(bridge_density(0.3).log_concave_hint);
  EXPECT_FALSE(bridge_density(0.7).log_concave_hint);
}

TEST(Density, PotentialDerivativesMatchFiniteDifferences) {
  for (const auto& d : battery()) {
    for (double u : {0.1, 0.3, 0.55, 0.8}) {
      const double x = d.support.lower_finite() && d.support.upper_finite()
                           ? d.support.lo + u * (d.support.hi - d.support.lo)
                           : (d.support.lower_finite() ? d.support.lo + 4.0 * u : 6.0 * u - 2.9);
      EXPECT_NEAR(d.dphi(x), finite_diff(d.phi, x, 1), 1e-6 * std::max(1.0, std::abs(d.dphi(x)))) << d.name << " " << x;
      EXPECT_NEAR(d.d2phi(x), finite_diff(d.phi, x, 2), 1e-4 * std::max(1.0, std::abs(d.d2phi(x)))) << d.name << " " << x;
    }
  }
}

TEST(Measure, CdfExamples) {
  EXPECT_NEAR(Measure1D(uniform_density(0.0, 1.0)).cdf(0.3), 0.3, 1e-12);
  EXPECT_NEAR(Measure1D(normal_density(0.0, 1.0)).cdf(0.0), 0.5, 1e-12);
  EXPECT_NEAR(Measure1D(cauchy_density()).cdf(1.0), 0.75, 1e-12);
}

TEST(Measure, CdfAgainstClosedForms) {
  const Measure1D n(normal_density(0.0, 1.0));
  const Measure1D l(logistic_density());
  const Measure1D c(cauchy_density());
  const Measure1D g(gamma_density(2.0));
  for (double x : {-30.0, -8.0, -2.5, -0.3, 0.0, 0.7, 3.0, 9.0}) {
    EXPECT_NEAR(n.cdf(x), std_normal_cdf(x), 1e-12 + 1e-9 * std_normal_cdf(x)) << x;
    EXPECT_NEAR(l.cdf(x), 1.0 / (1.0 + std::exp(-x)), 1e-12) << x;
    EXPECT_NEAR(c.cdf(x), 0.5 + std::atan(x) / std::numbers::pi, 1e-12) << x;
    if (x > 0.0) {
      EXPECT_NEAR(g.sf(x), (1.0 + x) * std::exp(-x), 1e-12) << x;
    }
  }
  // Tail accuracy is relative, not absolute.
  EXPECT_NEAR(n.cdf(-8.0) / std_normal_cdf(-8.0), 1.0, 1e-8);
  EXPECT_NEAR(n.sf(8.0) / std_normal_cdf(-8.0), 1.0, 1e-8);
}

TEST(Measure, CdfInvariants) {
  for (const auto& d : battery()) {
    const Measure1D m(d);
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = m.quantile(1e-10) + (m.quantile(1.0 - 1e-10) - m.quantile(1e-10)) * i / 400.0;
      const double F = m.cdf(x);
      EXPECT_GE(F, prev) << d.name;
      EXPECT_GE(F, 0.0);
      EXPECT_LE(F, 1.0);
      EXPECT_NEAR(F + m.sf(x), 1.0, 1e-12);
      prev = F;
    }
    const double lo = d.support.lower_finite() ? d.support.lo : -1e300;
    const double hi = d.support.upper_finite() ? d.support.hi : 1e300;
    EXPECT_LE(m.cdf(lo), 1e-9) << d.name;
    EXPECT_GE(m.cdf(hi), 1.0 - 1e-9) << d.name;
  }
}

TEST(Measure, QuantileInvertsCdf) {
  for (const auto& d : battery()) {
    const Measure1D m(d);
    for (double u : {1e-9, 1e-4, 0.02, 0.25, 0.5, 0.77, 0.999, 1.0 - 1e-7}) {
      const double x = m.quantile(u);
      EXPECT_NEAR(u < 0.5 ? m.cdf(x) : m.sf(x), u < 0.5 ? u : 1.0 - u, 1e-9 * std::min(u, 1.0 - u) + 1e-15)
          << d.name << " u=" << u;
    }
  }
  EXPECT_NEAR(Measure1D(exponential_density()).median(), std::log(2.0), 1e-12);
  EXPECT_THROW(Measure1D(logistic_density()).quantile(1.5), Error);
}

TEST(Measure, NormalisationFailureDetected) {
  auto d = normal_density(0.0, 1.0);
  const RealFn phi = d.phi;
  d.phi = [phi](double x) { return phi(x) - 0.01; };
  EXPECT_THROW(Measure1D{d}, Error);
}

TEST(Kernel, Examples) {
  const Measure1D u(uniform_density(0.0, 1.0));
  EXPECT_NEAR(u.kernel(0.25, 0.5), 0.125, 1e-12);
  for (const auto& d : battery()) {
    const Measure1D m(d);
    const double med = m.median();
    EXPECT_NEAR(m.kernel(med, med), 0.25, 1e-10) << d.name;
    EXPECT_NEAR(m.kernel(-1e300, 0.3), 0.0, 1e-12);
  }
}

TEST(Kernel, SymmetricNonNegativeAndHolderBounded) {
  for (const auto& d : battery()) {
    const Measure1D m(d);
    std::vector<double> xs;
    for (int i = 0; i < 25; ++i) xs.push_back(m.quantile(0.001 + 0.998 * i / 24.0));
    for (double x : xs) {
      for (double y : xs) {
        const double k = m.kernel(x, y);
        EXPECT_NEAR(k, m.kernel(y, x), 1e-15);
        EXPECT_GE(k, -1e-12);
        const double hx = std::sqrt(m.cdf(x) * m.sf(x)), hy = std::sqrt(m.cdf(y) * m.sf(y));
        EXPECT_LE(k, hx * hy + 1e-12) << d.name;
      }
    }
  }
}

TEST(Kernel, IntegralAgainstClosedForm) {
  // ∫ K(x, y) dy = Cov(1{X <= x}, -X) = E[X; X > x] - S(x) E[X]; for N(0,1) that is pdf(x).
  const Measure1D n(normal_density(0.0, 1.0));
  for (double x : {-3.0, -1.0, 0.0, 0.4, 2.2}) {
    const double v = n.kernel_integral(x, [](double) { return 1.0; });
    EXPECT_NEAR(v, std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi), 1e-10);
  }
}

TEST(Bivariate, HoeffdingIndependentIsZero) {
  const Measure1D a(logistic_density()), b(normal_density(0.0, 1.0));
  EXPECT_EQ(hoeffding_cov(independent_cdf(a, b)), 0.0);
}

TEST(Bivariate, HoeffdingGaussian) { EXPECT_NEAR(hoeffding_cov(gaussian_cdf(1.0, 1.0, 0.5)), 0.5, 1e-8); }

TEST(Bivariate, HoeffdingComonotone) {
  EXPECT_NEAR(hoeffding_cov(comonotone_cdf(Measure1D(normal_density(0.0, 1.0)))), 1.0, 1e-8);
}

TEST(Bivariate, HoeffdingMatchesDensityCovariance) {
  for (const char* spec : {"gaussian:sigma=2,tau=1,rho=-0.3", "morgenstern:theta=-0.5", "frank:theta=5",
                           "clayton:theta=0.75"}) {
    const auto m = parse_model(spec);
    EXPECT_NEAR(hoeffding_cov(bivariate_cdf(m)), model_covariance(m), 1e-7) << spec;
  }
  // Morgenstern: Cov = theta / 36.
  EXPECT_NEAR(hoeffding_cov(bivariate_cdf(morgenstern_model(0.5))), 0.5 / 36.0, 1e-10);
}

TEST(Bivariate, CopulaCdfMatchesDensity) {
  // d2 H / dx dy = h at interior points.
  for (const char* spec : {"morgenstern:theta=0.5", "frank:theta=2", "frank:theta=0.5", "clayton:theta=0.6"}) {
    const auto m = parse_model(spec);
    const auto H = bivariate_cdf(m);
    for (double x : {0.2, 0.5, 0.8}) {
      for (double y : {0.3, 0.6}) {
        const double h = 1e-4;
        const double mixed = (H(x + h, y + h) - H(x + h, y - h) - H(x - h, y + h) + H(x - h, y - h)) / (4.0 * h * h);
        EXPECT_NEAR(mixed, m.h(x, y), 1e-5 * std::max(1.0, m.h(x, y))) << spec;
      }
    }
    EXPECT_NEAR(H(1.0, 0.4), 0.4, 1e-12);
    EXPECT_NEAR(H(0.7, 1.0), 0.7, 1e-12);
  }
}

TEST(Bivariate, FrechetUpperBoundAndMonotone) {
  const auto H = gaussian_cdf(1.0, 2.0, 0.4);
  double prev = 0.0;
  for (double t = -4.0; t <= 4.0; t += 0.5) {
    const double v = H(t, 0.5);
    EXPECT_LE(v, std::min(H.F.cdf(t), H.G.cdf(0.5)) + 1e-12);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
}
