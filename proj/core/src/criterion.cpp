#include "efron/criterion.hpp"

#include <cmath>
#include <limits>

#include "efron/error.hpp"

namespace efron {

void validate(const GridSpec& g) {
  if (g.n < 2 || !(g.coverage > 0.0 && g.coverage < 1.0)) {
    throw Error(ErrorCode::BadParameter, "grid needs n >= 2 and 0 < coverage < 1");
  }
}

std::vector<double> grid_levels(const GridSpec& grid) {
  validate(grid);
  std::vector<double> u(static_cast<std::size_t>(grid.n));
  const double lo = 0.5 * grid.coverage;
  for (int i = 0; i < grid.n; ++i) u[static_cast<std::size_t>(i)] = lo + (1.0 - grid.coverage) * i / (grid.n - 1);
  return u;
}

CriterionReport criterion(const ConditionalSlice& slice, const GridSpec& grid) {
  const auto levels = grid_levels(grid);
  const JointModel2D& m = slice.model();
  const double s = slice.s();
  CriterionReport r;
  r.s = s;
  double worst_x = std::numeric_limits<double>::infinity();
  double worst_y = std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (double u : levels) {
    const double x = slice.mu1().quantile(u);
    const double vx = m.d22(x, s - x) - m.d12(x, s - x);
    const double y = slice.mu2().quantile(u);
    const double vy = m.d11(s - y, y) - m.d12(s - y, y);
    if (std::isfinite(vx) && m.h(x, s - x) > 1e-300) {
      r.grid_x.push_back(x);
      r.values_x.push_back(vx);
      worst_x = std::min(worst_x, vx);
      if (vx < worst) {
        worst = vx;
        r.witness_x = x;
        r.witness_y = s - x;
      }
    } else {
      ++r.skipped;
    }
    if (std::isfinite(vy) && m.h(s - y, y) > 1e-300) {
      r.grid_y.push_back(y);
      r.values_y.push_back(vy);
      worst_y = std::min(worst_y, vy);
      if (vy < worst) {
        worst = vy;
        r.witness_x = s - y;
        r.witness_y = y;
      }
    } else {
      ++r.skipped;
    }
  }
  r.min_value_x = worst_x;
  r.min_value_y = worst_y;
  r.min_value = worst;
  r.holds_x = !r.values_x.empty() && worst_x >= kCriterionTolerance;
  r.holds_y = !r.values_y.empty() && worst_y >= kCriterionTolerance;
  return r;
}

CriterionReport criterion(const JointModel2D& model, double s, const GridSpec& grid) {
  return criterion(ConditionalSlice(model, s), grid);
}

}  // namespace efron
