#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "efron/density.hpp"
#include "efron/quadrature.hpp"

namespace efron {

using RealFn2 = std::function<double(double, double)>;

/// Bivariate density h = exp(-phi) on an open rectangle (possibly the plane),
/// with the analytic gradient and Hessian of phi.
struct JointModel2D {
  std::string family;
  std::vector<std::pair<std::string, double>> params;
  std::string spec;  // canonical `family:param=value,...`

  Interval support_x;
  Interval support_y;
  RealFn2 phi;
  RealFn2 d1;
  RealFn2 d2;
  RealFn2 d11;
  RealFn2 d12;
  RealFn2 d22;

  // Lines x = at (resp. y = at) across which d1 (resp. d2) jumps; only the
  // independent family with a kinked marginal has any.
  std::vector<PotentialJump> kinks_x;
  std::vector<PotentialJump> kinks_y;

  // Marginals when the family is `independent`.
  std::optional<Density1D> marginal_x;
  std::optional<Density1D> marginal_y;

  // Length-scale hints used as quadrature split points, and the box the
  // derivative check probes.
  std::vector<double> hints_x;
  std::vector<double> hints_y;
  Interval probe_x{0.0, 1.0};
  Interval probe_y{0.0, 1.0};

  double h(double x, double y) const;
  bool in_support(double x, double y) const;
  double param(std::string_view key) const;
};

JointModel2D gaussian_model(double sigma, double tau, double rho);
JointModel2D morgenstern_model(double theta);
JointModel2D frank_model(double theta);
JointModel2D clayton_oakes_model(double theta);
JointModel2D independent_model(const Density1D& gx, const Density1D& gy);

/// Builds and validates a model: mass 1 within 1e-6 by iterated quadrature
/// (NormalizationFailure otherwise) and analytic partials within 1e-4 of
/// finite differences on a 9x9 probe grid (InconsistentDerivatives otherwise).
/// Parameters out of range throw BadParameter.
///
/// Families and keys: gaussian (sigma, tau, rho; defaults 1, 1, 0),
/// morgenstern (theta), frank (theta), clayton_oakes (theta), and
/// independent (x, y: density specs such as `logistic` or `gamma(2)`).
JointModel2D make_model(std::string_view family, const std::map<std::string, std::string>& params);

// `family:key=value,...`, e.g. `frank:theta=2` or `independent:x=gamma(2),y=gamma(3)`.
JointModel2D parse_model(std::string_view spec);

// Mass of h over the support by iterated quadrature.
double model_mass(const JointModel2D& model);

// Cov(X, Y) under h by iterated quadrature.
double model_covariance(const JointModel2D& model);

/// Largest |analytic - finite difference| / max(1, |analytic|) over the five
/// partials on an n x n grid spanning the probe box. Stencils that would cross
/// a declared kink line are nudged off it.
double hessian_check(const JointModel2D& model, int n_points = 9);

}  // namespace efron
