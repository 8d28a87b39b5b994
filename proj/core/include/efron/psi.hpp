#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "efron/joint_model.hpp"
#include "efron/slice.hpp"

namespace efron {

/// Test function Psi(x, y) with its partials and monotonicity declarations.
struct PsiFunction {
  std::string name;
  RealFn2 value;
  RealFn2 d1;
  RealFn2 d2;
  bool monotone_x = false;
  bool monotone_y = false;
  // False for indicators; the bound operations refuse those.
  bool differentiable = true;
  // Abscissae where Psi or a partial is not smooth, per coordinate.
  std::vector<double> kinks_x;
  std::vector<double> kinks_y;
  // Set when Psi depends on one coordinate only.
  std::optional<Axis> single_axis;
  RealFn single;  // Psi as a function of that coordinate
};

PsiFunction constant_psi(double c);
PsiFunction linear_psi(double a, double b);
PsiFunction indicator_psi(Axis axis, double c);
PsiFunction tanh_psi(Axis axis);
// Smoothstep 3t^2 - 2t^3 from 0 at c - width/2 to 1 at c + width/2.
PsiFunction ramp_psi(Axis axis, double c, double width);

/// Mini-language: `const(c)`, `x`, `y`, `linear(a,b)` (a x + b y),
/// `indicator(x>c)`, `indicator(y>c)`, `tanh(x)`, `tanh(y)`,
/// `ramp(c,width)` (in x) and `ramp(y,c,width)`.
PsiFunction parse_psi(std::string_view spec);

// Smallest of d1 (when monotone_x) and d2 (when monotone_y) over a grid on
// the box; a monotone declaration is honest when this is >= -1e-9.
double min_declared_slope(const PsiFunction& psi, Interval bx, Interval by, int n = 33);

}  // namespace efron
