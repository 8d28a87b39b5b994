#pragma once

#include <span>
#include <string>
#include <vector>

#include "efron/measure.hpp"

namespace efron {

/// ∬ a'(x) K(x, y) b'(y) dx dy as an outer integral of a'(x) times the
/// kernel integral of b'. `kinks` are split points for a' and b'.
double cov_kernel_form(const Measure1D& m, const RealFn& a_prime, const RealFn& b_prime,
                       std::span<const double> kinks = {});

// E[a b] - E[a] E[b], centred before multiplying.
double cov_direct(const Measure1D& m, const RealFn& a, const RealFn& b, std::span<const double> kinks = {});

struct IndicatorIdentity {
  double z = 0.0;
  double lhs = 0.0;  // F(z) E[b] - E[b; X <= z]
  double rhs = 0.0;  // ∫ K(z, y) b'(y) dy (+ jump terms)
  double survival = 0.0;
  // False when ∫ |b'| sqrt(F (1 - F)) looks divergent; the identity is then
  // not covered and lhs / rhs are best effort (NaN when they do not converge).
  bool tail_condition_ok = true;
  std::string note;

  /// E[b | X > z] - E[b], i.e. lhs / (1 - F(z)).
  double mean_residual_life() const { return survival > 0.0 ? lhs / survival : 0.0; }
};

/// Covariance identity with a = 1(-inf, z]. `b_jumps` are points where b
/// itself jumps (b' then carries a point mass there, as for b = sign).
/// Throws HypothesisViolation when b is not integrable against F.
IndicatorIdentity indicator_identity(const Measure1D& m, double z, const RealFn& b, const RealFn& b_prime,
                                     std::span<const PotentialJump> b_jumps = {},
                                     std::span<const double> kinks = {});

/// ∫ K(x, y) phi''(y) dy plus the point masses of phi'' at its kinks. Equals
/// f(x) when phi' is integrable and f vanishes at the ends of the support.
///
/// Throws HypothesisViolation when f does not decay at a finite endpoint
/// (the potential there stays bounded) or ∫ |phi'| f diverges.
double density_recovery(const Measure1D& m, double x);

// The checks density_recovery runs, without the integral. Empty when clean.
std::string density_recovery_violation(const Measure1D& m);

}  // namespace efron
