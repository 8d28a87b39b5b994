#pragma once

#include <vector>

#include "efron/joint_model.hpp"
#include "efron/slice.hpp"

namespace efron {

// Conditional-quantile grid on a slice: n levels spread evenly over
// [coverage/2, 1 - coverage/2].
struct GridSpec {
  int n = 65;
  double coverage = 1e-6;
};

void validate(const GridSpec& g);

/// Signs of the two Hessian differences along x + y = s:
///   values_x[i] = (phi_22 - phi_12)(x_i, s - x_i),
///   values_y[i] = (phi_11 - phi_21)(s - y_i, y_i),
/// with x_i, y_i the conditional quantiles of X and Y. Points where either
/// value is not finite (corners of copula supports) are skipped and counted.
struct CriterionReport {
  double s = 0.0;
  std::vector<double> grid_x;
  std::vector<double> grid_y;
  std::vector<double> values_x;
  std::vector<double> values_y;
  bool holds_x = true;
  bool holds_y = true;
  double min_value_x = 0.0;
  double min_value_y = 0.0;
  double min_value = 0.0;
  // Worst point over both sides, as a point (x, y) on the line.
  double witness_x = 0.0;
  double witness_y = 0.0;
  int skipped = 0;

  bool holds() const { return holds_x && holds_y; }
};

inline constexpr double kCriterionTolerance = -1e-9;

CriterionReport criterion(const ConditionalSlice& slice, const GridSpec& grid = {});
// Throws EmptySlice when the line misses the support.
CriterionReport criterion(const JointModel2D& model, double s, const GridSpec& grid = {});

// Quantile levels of the grid.
std::vector<double> grid_levels(const GridSpec& grid);

}  // namespace efron
