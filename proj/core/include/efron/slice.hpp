#pragma once

#include <vector>

#include "efron/joint_model.hpp"
#include "efron/measure.hpp"

namespace efron {

enum class Axis { X, Y };

/// Conditional laws of X and of Y given X + Y = s.
///
/// f1(x) = h(x, s-x) / Z1 and f2(y) = h(s-y, y) / Z2 are normalised
/// separately. Z2 equals Z1 analytically, so the reflection f2(y) = f1(s-y)
/// compares two independent computations.
/// Potentials are phi1 = phi(x, s-x) + J1 with J1 = log Z1, and likewise for
/// phi2. J1 is recomputed per slice and never differentiated.
class ConditionalSlice {
 public:
  // Throws EmptySlice when the line misses the support or carries no mass.
  ConditionalSlice(const JointModel2D& model, double s);

  double s() const { return s_; }
  double J1() const { return j1_; }
  double J2() const { return j2_; }
  double Z1() const;

  const JointModel2D& model() const { return model_; }
  const Measure1D& mu1() const { return mu1_; }
  const Measure1D& mu2() const { return mu2_; }
  const Density1D& f1() const { return mu1_.density(); }
  const Density1D& f2() const { return mu2_.density(); }

  Interval x_range() const { return f1().support; }
  Interval y_range() const { return f2().support; }

  // True when that end of the x-range is set by the y-side of the support
  // rectangle, i.e. it moves with s.
  bool lower_end_moves() const { return lo_moves_; }
  bool upper_end_moves() const { return hi_moves_; }

  struct Side {
    Density1D density;
    double log_norm = 0.0;
    bool lo_moves = false;
    bool hi_moves = false;
  };

 private:
  ConditionalSlice(const JointModel2D& model, double s, Side x_side, Side y_side);

  JointModel2D model_;
  double s_;
  double j1_ = 0.0;
  double j2_ = 0.0;
  bool lo_moves_ = false;
  bool hi_moves_ = false;
  Measure1D mu1_;
  Measure1D mu2_;
};

}  // namespace efron
