#pragma once

#include <string>

#include "efron/joint_model.hpp"
#include "efron/measure.hpp"

namespace efron {

/// Joint distribution function H with marginals F (of X) and G (of Y).
struct BivariateCDF {
  std::string name;
  RealFn2 H;
  // H - F G when it has a more accurate closed form than the difference.
  RealFn2 excess;
  Measure1D F;
  Measure1D G;
  // H - F G has a kink on y = x (singular joint law on the diagonal).
  bool diagonal_kink = false;

  double operator()(double x, double y) const { return H(x, y); }
  double excess_at(double x, double y) const;
};

BivariateCDF independent_cdf(const Measure1D& F, const Measure1D& G);
// Y = X: H(x, y) = F(min(x, y)).
BivariateCDF comonotone_cdf(const Measure1D& F);
BivariateCDF gaussian_cdf(double sigma, double tau, double rho);
// Closed forms for gaussian, morgenstern, frank and clayton_oakes models, and
// F G for independent ones.
BivariateCDF bivariate_cdf(const JointModel2D& model);

// ∬ (H - F G) dx dy; Cov(X, Y) for square-integrable marginals.
double hoeffding_cov(const BivariateCDF& H);

}  // namespace efron
