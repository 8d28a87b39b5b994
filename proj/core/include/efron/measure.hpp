#pragma once

#include <memory>
#include <span>
#include <vector>

#include "efron/density.hpp"
#include "efron/quadrature.hpp"

namespace efron {

/// A Density1D with its distribution function tabulated at construction.
///
/// The support is mapped to a bounded t-interval (affine for finite ends,
/// rational for infinite ones, centred and scaled from a preliminary pass) and
/// cut into panels refined until each carries a Gauss-Kronrod error below
/// 1e-12 of its own mass (or 1e-18 absolute). Left and right cumulative sums are stored
/// separately, so F is accurate relative to itself in the left tail and
/// 1 - F likewise in the right tail. A query adds a 10-point Gauss panel over
/// the partial cell, which keeps the table exact to quadrature accuracy
/// rather than to interpolation accuracy.
///
/// Immutable after construction; copies share the table.
class Measure1D {
 public:
  // Throws NormalizationFailure if the density's mass is off 1 by more than 1e-7.
  explicit Measure1D(Density1D density);

  const Density1D& density() const;
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;
  // Throws QuantileInversion if u is outside [0,1] or the root search fails.
  double quantile(double u) const;
  double median() const;

  // K(x,y) = F(x ∧ y) - F(x)F(y), evaluated as F(lo)·(1 - F(hi)).
  double kernel(double x, double y) const;

  /// ∫ K(x,y) g(y) dy, split at x:
  ///   (1 - F(x)) ∫_{y<x} F(y) g(y) dy + F(x) ∫_{y>x} (1 - F(y)) g(y) dy.
  double kernel_integral(double x, const RealFn& g, std::span<const double> g_kinks = {}) const;

  // ∫ g dF with the measure's breakpoints as split points.
  double expectation(const RealFn& g, std::span<const double> g_kinks = {}) const;

  // Kinks of the density plus a ladder of quantiles; used as split points so
  // the unit-scale maps inside integrate() see the right length scale.
  const std::vector<double>& breakpoints() const;

  // Breakpoints merged with `extra` (values outside the support dropped).
  std::vector<double> splits_with(std::span<const double> extra) const;

  // Raw mass of exp(-phi) before normalisation.
  double raw_mass() const;

 private:
  struct Table;
  std::shared_ptr<const Table> table_;
};

}  // namespace efron
