#include "efron/bivariate.hpp"

#include <cmath>
#include <numbers>

#include "efron/error.hpp"

namespace efron {

namespace {

// Standard bivariate normal density with correlation r.
double phi2(double a, double b, double r) {
  const double q = 1.0 - r * r;
  return std::exp(-(a * a - 2.0 * r * a * b + b * b) / (2.0 * q)) / (2.0 * std::numbers::pi * std::sqrt(q));
}

// Phi2(a, b; rho) - Phi(a) Phi(b) = ∫_0^rho phi2(a, b; r) dr.
double gaussian_excess(double a, double b, double rho) {
  if (rho == 0.0) return 0.0;
  return integrate_value([=](double r) { return phi2(a, b, r); }, Interval{std::min(0.0, rho), std::max(0.0, rho)},
                         QuadConfig{1e-12, 1e-16, 200}, {}, "gaussian cdf") *
         (rho > 0.0 ? 1.0 : -1.0);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

BivariateCDF copula(std::string name, RealFn2 C) {
  const Measure1D U(uniform_density(0.0, 1.0));
  BivariateCDF out{std::move(name), std::move(C), {}, U, U, false};
  return out;
}

}  // namespace

double BivariateCDF::excess_at(double x, double y) const {
  if (excess) return excess(x, y);
  return H(x, y) - F.cdf(x) * G.cdf(y);
}

BivariateCDF independent_cdf(const Measure1D& F, const Measure1D& G) {
  BivariateCDF out{"independent", [F, G](double x, double y) { return F.cdf(x) * G.cdf(y); },
                   [](double, double) { return 0.0; }, F, G, false};
  return out;
}

BivariateCDF comonotone_cdf(const Measure1D& F) {
  BivariateCDF out{"comonotone", [F](double x, double y) { return F.cdf(std::min(x, y)); },
                   [F](double x, double y) { return F.kernel(x, y); }, F, F, true};
  return out;
}

BivariateCDF gaussian_cdf(double sigma, double tau, double rho) {
  if (!(sigma > 0.0 && tau > 0.0) || !(std::abs(rho) < 1.0)) {
    throw Error(ErrorCode::BadParameter, "gaussian cdf needs sigma, tau > 0 and |rho| < 1");
  }
  const Measure1D F(normal_density(0.0, sigma * sigma));
  const Measure1D G(normal_density(0.0, tau * tau));
  BivariateCDF out{"gaussian",
                   [=](double x, double y) {
                     const double a = x / sigma, b = y / tau;
                     return std_normal_cdf(a) * std_normal_cdf(b) + gaussian_excess(a, b, rho);
                   },
                   [=](double x, double y) { return gaussian_excess(x / sigma, y / tau, rho); }, F, G, false};
  return out;
}

BivariateCDF bivariate_cdf(const JointModel2D& model) {
  const std::string& f = model.family;
  if (f == "gaussian") return gaussian_cdf(model.param("sigma"), model.param("tau"), model.param("rho"));
  if (f == "independent") {
    if (!model.marginal_x || !model.marginal_y) throw Error(ErrorCode::BadParameter, "independent model without marginals");
    return independent_cdf(Measure1D(*model.marginal_x), Measure1D(*model.marginal_y));
  }
  const double t = model.param("theta");
  auto clip = [](double u) { return std::clamp(u, 0.0, 1.0); };
  if (f == "morgenstern") {
    auto out = copula(model.spec, [=](double x, double y) {
      const double u = clip(x), v = clip(y);
      return u * v * (1.0 + t * (1.0 - u) * (1.0 - v));
    });
    out.excess = [=](double x, double y) {
      const double u = clip(x), v = clip(y);
      return t * u * v * (1.0 - u) * (1.0 - v);
    };
    return out;
  }
  if (f == "frank") {
    if (t == 1.0) return copula(model.spec, [=](double x, double y) { return clip(x) * clip(y); });
    const double L = std::log(t);
    return copula(model.spec, [=](double x, double y) {
      const double u = clip(x), v = clip(y);
      return std::log1p(std::expm1(L * u) * std::expm1(L * v) / (t - 1.0)) / L;
    });
  }
  if (f == "clayton_oakes") {
    return copula(model.spec, [=](double x, double y) {
      const double u = clip(x), v = clip(y);
      if (u == 0.0 || v == 0.0) return 0.0;
      return std::pow(std::pow(u, -t) + std::pow(v, -t) - 1.0, -1.0 / t);
    });
  }
  throw Error(ErrorCode::BadParameter, "no distribution function for family '" + f + "'");
}

double hoeffding_cov(const BivariateCDF& H) {
  const Interval sx = H.F.density().support;
  const Interval sy = H.G.density().support;
  const auto bx = H.F.breakpoints();
  const auto by = H.G.breakpoints();
  return integrate_value(
      [&](double x) {
        std::vector<double> sp = by;
        if (H.diagonal_kink && sy.contains(x)) sp.push_back(x);
        return integrate_value([&](double y) { return H.excess_at(x, y); }, sy, QuadConfig{1e-10, 1e-14, 2000}, sp,
                               "hoeffding (inner)");
      },
      sx, QuadConfig{1e-9, 1e-13, 2000}, bx, "hoeffding");
}

}  // namespace efron
