#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "efron/quadrature.hpp"

namespace efron {

// Point where phi' jumps by `size` (phi'(at+) - phi'(at-)). The jump acts as a
// point mass of phi'' in the Stieltjes sense.
struct PotentialJump {
  double at;
  double size;
};

/// Density f = exp(-phi) on an open interval.
struct Density1D {
  std::string name;
  Interval support{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  RealFn phi;
  RealFn dphi;
  RealFn d2phi;
  bool log_concave_hint = false;
  std::vector<PotentialJump> kinks;

  double pdf(double x) const;
  std::vector<double> kink_points() const;
};

// Throws NormalizationFailure when exp(-phi) does not integrate to 1 within
// 1e-7, and BadParameter when log_concave_hint is set but phi'' < -1e-9 on a
// dense support grid.
void validate(const Density1D& d);

Density1D normal_density(double mean, double variance);
Density1D gamma_density(double theta);
Density1D exponential_density();
Density1D logistic_density();
Density1D laplace_density();
Density1D cauchy_density();
Density1D bridge_density(double theta);
Density1D uniform_density(double a, double b);

/// Built-ins by name: normal(m,v), gamma(theta), logistic, laplace, cauchy,
/// bridge(theta), uniform(a,b), exponential. `normal` alone is normal(0,1) and
/// `uniform` alone is uniform(0,1).
Density1D parse_density(std::string_view spec);

}  // namespace efron
