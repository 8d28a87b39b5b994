#pragma once

#include <string>
#include <vector>

#include "efron/criterion.hpp"
#include "efron/joint_model.hpp"
#include "efron/psi.hpp"
#include "efron/slice.hpp"

namespace efron {

// P[X > t | X + Y = s] (axis X) or P[Y > t | X + Y = s] (axis Y).
double survival(const ConditionalSlice& slice, Axis axis, double threshold);

struct RegularityOptions {
  double eps = 0.1;  // half-width of the neighbourhood [s0 - eps, s0 + eps]
};

struct RegularityReport {
  bool ok = true;
  std::vector<std::string> warnings;
};

/// Sampled surrogate for the domination hypotheses behind differentiating
/// under the integral sign. At s in {s0 +- eps, s0 +- eps/2, s0} it checks
///  - the slice exists;
///  - on every infinite side, the envelope (|phi_1| + |phi_2| + |phi_11 -
///    phi_12| + |phi_22 - phi_12|) f1 (times 1 + |Psi| when Psi is given)
///    decays faster than |x|^-1, judged by the log-log slope between the
///    1e-5 and 1e-8 tail quantiles;
///  - at an end of the x-range that moves with s, the slice density
///    vanishes; otherwise the kernel formulas miss a boundary term.
/// Failures become warnings, never errors.
RegularityReport check_regularity(const JointModel2D& model, double s0, const PsiFunction* psi = nullptr,
                                  const RegularityOptions& opt = {});

struct SurvivalDerivative {
  double value = 0.0;
  // Axis Y only: the second kernel form (through mu1) and its gap to value.
  double alt_value = 0.0;
  double form_gap = 0.0;
  std::vector<std::string> warnings;
};

/// d/ds S(threshold; s) at s0 by the kernel formulas:
///   X: ∫ K1(x, x') (phi_22 - phi_12)(x', s0 - x') dx'
///   Y: ∫ K2(y, y') (phi_11 - phi_21)(s0 - y', y') dy'
///      and again as ∫ K1(s0 - y, v) (phi_11 - phi_21)(v, s0 - v) dv.
/// A gap above 1e-6 between the two Y forms is reported as a warning.
SurvivalDerivative dds_survival(const ConditionalSlice& slice, Axis axis, double threshold);
// Builds the slice at s0 and runs check_regularity first.
SurvivalDerivative dds_survival(const JointModel2D& model, Axis axis, double threshold, double s0,
                                const RegularityOptions& opt = {});

struct DensitySum {
  double lhs = 0.0;  // f1(x; s0)
  double rhs = 0.0;  // dS_X(x)/ds + dS_Y(s0 - x)/ds
  double dds_x = 0.0;
  double dds_y = 0.0;
  std::vector<std::string> warnings;
};

DensitySum density_sum_identity(const ConditionalSlice& slice, double x);
DensitySum density_sum_identity(const JointModel2D& model, double s0, double x, const RegularityOptions& opt = {});

/// I(s) = E[Psi(X, Y) | X + Y = s] = ∫ Psi(s - y, y) f2(y; s) dy.
double efron_I(const ConditionalSlice& slice, const PsiFunction& psi);
double efron_I(const JointModel2D& model, const PsiFunction& psi, double s);

/// ∫_0^1 Psi(F_s^{-1}(u)) du through the conditional quantile function of the
/// coordinate Psi depends on. Only one-variable Psi is accepted (BadParameter
/// otherwise); the two-variable quantile pairing is a comonotone coupling,
/// not the law on the line.
double efron_I_via_quantiles(const ConditionalSlice& slice, const PsiFunction& psi);
double efron_I_via_quantiles(const JointModel2D& model, const PsiFunction& psi, double s);

struct IPrime {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// I'(s0) = E[d1 Psi | s0] - Cov[Psi, d1 phi | s0], both under f2.
/// Psi must be differentiable (BadParameter for indicators).
IPrime efron_I_prime(const ConditionalSlice& slice, const PsiFunction& psi);
IPrime efron_I_prime(const JointModel2D& model, const PsiFunction& psi, double s0, const RegularityOptions& opt = {});

struct BoundOptions {
  GridSpec grid{};
  RegularityOptions regularity{};
  double tolerance = 1e-6;
};

struct BoundReport {
  double s0 = 0.0;
  double I_prime = 0.0;
  double bound_x = 0.0;
  double bound_y = 0.0;
  double bound_mixed = 0.0;
  double sup_ratio_x = 0.0;
  double sup_ratio_y = 0.0;
  double E_d1psi = 0.0;
  double E_d2psi = 0.0;
  bool psi_monotone = false;
  bool criterion_holds = false;
  // Preconditions met, so I_prime >= bound_mixed - tolerance is asserted.
  bool claimed = false;
  bool satisfied = true;
  // Grid points where both survival derivatives vanish (ratio 0/0).
  std::vector<double> degenerate_points;
  std::vector<std::string> warnings;
};

/// With r(x) = dS_Y(s0 - x)/ds / (dS_X(x)/ds + dS_Y(s0 - x)/ds) on the
/// conditional-quantile grid of X (coverage 1 - 1e-6 by default):
///   bound_x = (1 - sup r) E[d1 Psi | s0],
///   bound_y = (1 - sup (1 - r)) E[d2 Psi | s0],
///   bound_mixed = max(bound_x, bound_y).
/// Ratios are clipped to [0, 1]; they can only leave it when the criterion
/// fails, in which case no bound is claimed.
BoundReport derivative_lower_bound(const JointModel2D& model, const PsiFunction& psi, double s0,
                                   const BoundOptions& opt = {});

struct RegressionBound {
  double bound = 0.0;
  double sup_ratio = 0.0;
  double E_psi_prime = 0.0;
  std::vector<std::string> warnings;
};

/// Lower bound for d/dx E[T | U + Z = x] when E[T | U = u] = Psi(u) with
/// Psi' = psi_prime >= 0: (1 - sup_u r(u)) E[Psi'(U) | U + Z = x], r as above
/// with (U, Z) in the roles of (X, Y).
RegressionBound regression_bound(const JointModel2D& uz, const RealFn& psi_prime, double x,
                                 const BoundOptions& opt = {});
RegressionBound regression_bound(const Density1D& u, const Density1D& z, const RealFn& psi_prime, double x,
                                 const BoundOptions& opt = {});

}  // namespace efron
