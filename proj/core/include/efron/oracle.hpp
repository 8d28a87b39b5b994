#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "efron/density.hpp"
#include "efron/joint_model.hpp"
#include "efron/psi.hpp"
#include "efron/slice.hpp"

namespace efron {

/// Brute-force recomputation on fixed uniform grids with the trapezoid rule.
/// Nothing here goes through Measure1D or the adaptive integrator.
struct GridOracleConfig {
  int n_points = 4001;
  // Grids stop where the density drops below this fraction of its peak.
  double truncation_mass = 1e-8;
  // Reserved for sampling paths; the grid oracles are deterministic.
  std::uint64_t seed = 0;
};

// Throws BadParameter unless n_points >= 101 and 0 < truncation_mass < 1e-3.
void validate(const GridOracleConfig& cfg);

/// ∫ g(x) dx by composite trapezoid on [a, b], with `splits` as segment
/// boundaries and about n nodes in total.
double trapezoid(const RealFn& g, double a, double b, std::span<const double> splits, int n);

/// [a, b] inside `range` beyond which exp(-(phi - min phi)) < trunc, found by
/// doubling steps outward from the smallest potential seen on a coarse scan.
/// Finite ends are nudged inward by 1e-12 relative.
Interval truncation_window(const RealFn& phi, Interval range, double trunc, double centre_hint);

// E[Psi(X, Y) | X + Y = s]. Throws EmptySlice.
double grid_conditional_expectation(const JointModel2D& model, const PsiFunction& psi, double s,
                                    const GridOracleConfig& cfg = {});

// P[X > t | s] or P[Y > t | s].
double grid_survival(const JointModel2D& model, Axis axis, double threshold, double s, const GridOracleConfig& cfg = {});

/// Central difference of grid_survival in s with step 1e-3 max(1, |s0|). The
/// truncation window is taken at s0 and kept for both evaluations; only
/// ends set by the support move with s.
double grid_survival_derivative(const JointModel2D& model, Axis axis, double threshold, double s0,
                                const GridOracleConfig& cfg = {});

using RealFn3 = std::function<double(double, double, double)>;

struct MultiPsi {
  std::string name;
  RealFn3 value;
  std::array<std::vector<double>, 3> kinks;
  std::array<bool, 3> monotone{false, false, false};
};

MultiPsi multi_constant(double c);
// 1{x_i > c}
MultiPsi multi_indicator(int coordinate, double c);
// sum_i a_i x_i
MultiPsi multi_linear(std::array<double, 3> a);

/// I(s) = E[Psi(X1, X2, X3) | X1 + X2 + X3 = s] for independent X_i, by
/// iterated trapezoid with x1 outer, x2 inner and x3 = s - x1 - x2.
std::vector<double> efron_I_multi(const std::array<Density1D, 3>& densities, const MultiPsi& psi,
                                  std::span<const double> s_grid, const GridOracleConfig& cfg = {});

}  // namespace efron
