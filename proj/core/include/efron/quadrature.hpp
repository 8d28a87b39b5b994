#pragma once

#include <functional>
#include <span>
#include <vector>

namespace efron {

using RealFn = std::function<double(double)>;

// Either endpoint may be +-infinity.
struct Interval {
  double lo;
  double hi;

  bool lower_finite() const;
  bool upper_finite() const;
  bool contains(double x) const { return x > lo && x < hi; }
};

// Throws BadParameter unless lo < hi.
Interval make_interval(double lo, double hi);

struct QuadConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
};

// Throws BadParameter when a tolerance or the subdivision budget is not positive.
void validate(const QuadConfig& cfg);

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (10/21) integration over `domain`.
///
/// Infinite ends are compactified with x = c + t/(1-t) (one infinite end) or
/// x = t/(1-t^2) (both ends infinite) before subdivision. `split_points` inside
/// the domain become fixed segment boundaries, which is how kinks and
/// discontinuities of the integrand should be declared. Nodes never touch the
/// segment ends, so integrands that blow up at an open endpoint are fine.
///
/// Exhausting the budget is not an error: the best estimate comes back with
/// converged = false. A NaN or infinite value at an interior node throws
/// Error(NonFiniteEvaluation).
QuadResult integrate(const RealFn& f, Interval domain, const QuadConfig& cfg = {},
                     std::span<const double> split_points = {});

/// integrate() returning only the value. Running out of budget is tolerated
/// while the error estimate stays within 1e4 times the requested tolerance
/// (or below 1e-10); beyond that it throws Error(NonConvergence) naming `what`.
double integrate_value(const RealFn& f, Interval domain, const QuadConfig& cfg,
                       std::span<const double> split_points, const char* what);

/// Integral of f over [domain.lo, x]; x == domain.lo yields an exact zero.
QuadResult integrate_upto(const RealFn& f, double x, Interval domain, const QuadConfig& cfg = {},
                          std::span<const double> split_points = {});

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
};

/// One 21-point Gauss-Kronrod panel on [a, b] with the QUADPACK error
/// estimate. Non-finite integrand values throw Error(NonFiniteEvaluation).
PanelResult kronrod21(const RealFn& f, double a, double b);

/// One 10-point Gauss-Legendre panel on [a, b] (a > b is allowed).
double gauss10(const RealFn& f, double a, double b);

/// Five-point central difference of order 1 or 2. With h <= 0 the step is
/// chosen automatically: max(1e-5, 1e-5|x|) for the first derivative and
/// eps^(1/6) * max(1, |x|) for the second. f is evaluated on [x-2h, x+2h].
double finite_diff(const RealFn& f, double x, int order, double h = 0.0);

}  // namespace efron
