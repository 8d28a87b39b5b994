#include <gtest/gtest.h>

#include <cmath>

#include "efron/criterion.hpp"
#include "efron/error.hpp"
#include "efron/joint_model.hpp"
#include "efron/psi.hpp"

using namespace efron;

namespace {

bool holds_on(const char* spec, std::initializer_list<double> ss) {
  const auto m = parse_model(spec);
  for (double s : ss) {
    if (!criterion(m, s).holds()) return false;
  }
  return true;
}

}  // namespace

TEST(JointModel, GaussianIndependentPartials) {
  const auto m = parse_model("gaussian:sigma=1,tau=1,rho=0");
  for (double x : {-2.0, 0.3, 1.5}) {
    for (double y : {-1.0, 0.0, 2.5}) {
      EXPECT_DOUBLE_EQ(m.d11(x, y), 1.0);
      EXPECT_DOUBLE_EQ(m.d12(x, y), 0.0);
      EXPECT_DOUBLE_EQ(m.d22(x, y), 1.0);
    }
  }
}

TEST(JointModel, MorgensternZeroIsFlat) {
  const auto m = parse_model("morgenstern:theta=0");
  for (double x : {0.1, 0.5, 0.9}) {
    for (double y : {0.2, 0.7}) {
      EXPECT_EQ(m.phi(x, y), 0.0);
      EXPECT_EQ(m.d11(x, y), 0.0);
      EXPECT_EQ(m.d12(x, y), 0.0);
      EXPECT_EQ(m.d22(x, y), 0.0);
    }
  }
}

TEST(JointModel, FrankOneIsIndependentUniform) {
  const auto m = parse_model("frank:theta=1");
  EXPECT_EQ(m.h(0.3, 0.8), 1.0);
  EXPECT_EQ(m.d12(0.3, 0.8), 0.0);
  EXPECT_NEAR(model_covariance(m), 0.0, 1e-12);
}

TEST(JointModel, MassesAndCovariances) {
  EXPECT_NEAR(model_mass(gaussian_model(2.0, 1.0, -0.3)), 1.0, 1e-8);
  EXPECT_NEAR(model_covariance(gaussian_model(2.0, 1.0, -0.3)), -0.6, 1e-7);
  EXPECT_NEAR(model_covariance(morgenstern_model(1.0)), 1.0 / 36.0, 1e-9);
  for (double t : {0.25, 2.0, 5.0}) EXPECT_NEAR(model_mass(frank_model(t)), 1.0, 1e-8);
  for (double t : {0.3, 0.75, 2.0}) EXPECT_NEAR(model_mass(clayton_oakes_model(t)), 1.0, 1e-7);
}

TEST(JointModel, HessianCheck) {
  EXPECT_LE(hessian_check(gaussian_model(2.0, 1.0, -0.3), 9), 1e-4);
  EXPECT_LE(hessian_check(clayton_oakes_model(0.75), 9), 1e-4);
  EXPECT_LE(hessian_check(morgenstern_model(-0.5), 9), 1e-4);
  EXPECT_LE(hessian_check(frank_model(5.0), 9), 1e-4);
  EXPECT_LE(hessian_check(independent_model(logistic_density(), gamma_density(3.0)), 9), 1e-4);
}

TEST(JointModel, HessianCheckCatchesWrongPartials) {
  auto m = gaussian_model(1.0, 1.0, 0.5);
  m.d12 = [](double, double) { return 0.0; };
  EXPECT_GT(hessian_check(m, 9), 1e-2);
}

TEST(JointModel, ParseAndValidate) {
  EXPECT_EQ(parse_model("gaussian").spec, "gaussian:sigma=1,tau=1,rho=0");
  EXPECT_EQ(parse_model("clayton_oakes:theta=0.6").family, "clayton_oakes");
  EXPECT_EQ(parse_model("clayton:theta=0.6").family, "clayton_oakes");
  EXPECT_NO_THROW(parse_model("independent:x=gamma(2),y=gamma(3)"));
  EXPECT_THROW(parse_model("gaussian:rho=1"), Error);
  EXPECT_THROW(parse_model("gaussian:sigma=0"), Error);
  EXPECT_THROW(parse_model("morgenstern:theta=1.5"), Error);
  EXPECT_THROW(parse_model("frank:theta=-1"), Error);
  EXPECT_THROW(parse_model("clayton:theta=0"), Error);
  EXPECT_THROW(parse_model("frank:theta=2,theta=3"), Error);
  EXPECT_THROW(parse_model("gumbel:theta=2"), Error);
  EXPECT_THROW(parse_model("gaussian:nu=2"), Error);
}

TEST(Criterion, GaussianValuesConstant) {
  const auto m = parse_model("gaussian:sigma=1,tau=1,rho=0.5");
  for (double s : {-3.0, 0.0, 1.7}) {
    const auto r = criterion(m, s);
    EXPECT_TRUE(r.holds_x);
    EXPECT_TRUE(r.holds_y);
    for (double v : r.values_x) EXPECT_NEAR(v, 2.0, 1e-12);
    for (double v : r.values_y) EXPECT_NEAR(v, 2.0, 1e-12);
  }
}

TEST(Criterion, MorgensternValueAtCentre) {
  const auto m = morgenstern_model(0.5);
  EXPECT_NEAR(m.d22(0.5, 0.5) - m.d12(0.5, 0.5), 2.0, 1e-12);
  EXPECT_TRUE(criterion(m, 1.0).holds());
}

TEST(Criterion, FrankTwoFailsWithWitness) {
  const auto r = criterion(parse_model("frank:theta=2"), 1.0);
  EXPECT_FALSE(r.holds_x);
  EXPECT_LT(r.min_value, -1e-9);
  const auto m = parse_model("frank:theta=2");
  EXPECT_NEAR(r.witness_x + r.witness_y, 1.0, 1e-12);
  EXPECT_LT(m.d22(r.witness_x, r.witness_y) - m.d12(r.witness_x, r.witness_y), 0.0);
}

TEST(Criterion, GridCoversConditionalMass) {
  const auto r = criterion(parse_model("gaussian"), 0.0, GridSpec{65, 1e-6});
  EXPECT_EQ(r.grid_x.size(), 65u);
  // N(0, 1/2) quantiles at 5e-7 and 1 - 5e-7.
  EXPECT_NEAR(r.grid_x.front(), -3.4590, 1e-3);
  EXPECT_NEAR(r.grid_x.back(), 3.4590, 1e-3);
  EXPECT_THROW(validate(GridSpec{1, 1e-6}), Error);
}

TEST(Criterion, EmptySlice) {
  try {
    criterion(parse_model("frank:theta=2"), 2.5);
    FAIL() << "expected EmptySlice";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySlice);
  }
}

TEST(Criterion, GaussianThreshold) {
  // sigma = 1, tau = 2: the threshold sits at rho = -1/2.
  for (double rho : {-0.4, 0.0, 0.5}) {
    EXPECT_TRUE(holds_on(("gaussian:sigma=1,tau=2,rho=" + std::to_string(rho)).c_str(), {-2.0, 0.0, 2.0})) << rho;
  }
  EXPECT_FALSE(holds_on("gaussian:sigma=1,tau=2,rho=-0.9", {0.0}));
  EXPECT_FALSE(holds_on("gaussian:sigma=1,tau=2,rho=-0.6", {0.0}));
}

TEST(Criterion, CopulaThresholds) {
  const std::initializer_list<double> ss{0.2, 0.6, 1.0, 1.4, 1.8};
  for (const char* ok : {"morgenstern:theta=0", "morgenstern:theta=0.5", "morgenstern:theta=1", "frank:theta=0.25",
                         "frank:theta=0.5", "frank:theta=1", "clayton:theta=0.6", "clayton:theta=0.75",
                         "clayton:theta=0.9"}) {
    EXPECT_TRUE(holds_on(ok, ss)) << ok;
  }
  for (const char* bad : {"morgenstern:theta=-0.5", "morgenstern:theta=-1", "frank:theta=2", "frank:theta=5"}) {
    EXPECT_FALSE(holds_on(bad, ss)) << bad;
  }
}

TEST(Psi, ParseAndPartials) {
  const auto lin = parse_psi("linear(2,0.5)");
  EXPECT_DOUBLE_EQ(lin.value(1.0, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(lin.d1(0.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(lin.d2(0.0, 0.0), 0.5);
  EXPECT_TRUE(lin.monotone_x && lin.monotone_y);
  EXPECT_FALSE(lin.single_axis.has_value());

  const auto ind = parse_psi("indicator(x>1)");
  EXPECT_FALSE(ind.differentiable);
  EXPECT_EQ(ind.value(1.5, -9.0), 1.0);
  EXPECT_EQ(ind.value(0.5, 9.0), 0.0);
  ASSERT_EQ(ind.kinks_x.size(), 1u);

  const auto ramp = parse_psi("ramp(1,0.5)");
  EXPECT_EQ(ramp.value(0.7, 0.0), 0.0);
  EXPECT_EQ(ramp.value(1.3, 0.0), 1.0);
  EXPECT_NEAR(ramp.value(1.0, 0.0), 0.5, 1e-15);
  for (double x : {0.8, 0.95, 1.1, 1.2}) {
    EXPECT_NEAR(ramp.d1(x, 0.0), finite_diff([&](double t) { return ramp.value(t, 0.0); }, x, 1), 1e-7);
  }
  EXPECT_EQ(parse_psi("ramp(y,0,1)").single_axis, Axis::Y);
  EXPECT_NEAR(parse_psi("tanh(y)").d2(0.0, 0.3), 1.0 / std::pow(std::cosh(0.3), 2), 1e-15);
  EXPECT_EQ(parse_psi("const(3)").value(1.0, 2.0), 3.0);
  EXPECT_EQ(parse_psi("x").value(4.0, 2.0), 4.0);
  EXPECT_EQ(parse_psi("y").value(4.0, 2.0), 2.0);
  EXPECT_THROW(parse_psi("indicator(z>1)"), Error);
  EXPECT_THROW(parse_psi("ramp(1,-1)"), Error);
  EXPECT_THROW(parse_psi("sin(x)"), Error);
}

TEST(Psi, MonotoneDeclarationsHonest) {
  const Interval box{-3.0, 3.0};
  for (const char* spec : {"x", "y", "linear(1,2)", "tanh(x)", "tanh(y)", "ramp(0,1)", "ramp(y,0.5,0.2)", "const(2)"}) {
    EXPECT_GE(min_declared_slope(parse_psi(spec), box, box), -1e-9) << spec;
  }
  EXPECT_FALSE(parse_psi("linear(-1,1)").monotone_x);
}
