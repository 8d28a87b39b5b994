#include <algorithm>
#include <cmath>
#include <sstream>

#include "efron/efron.hpp"
#include "efron/error.hpp"

namespace efron {

namespace {

constexpr double kDegenerate = 1e-14;

struct RatioScan {
  double sup_r = 0.0;
  double inf_r = 1.0;
  int used = 0;
  std::vector<double> degenerate;
  std::vector<std::string> warnings;
};

// r(x) = dS_Y(s - x)/ds / (dS_X(x)/ds + dS_Y(s - x)/ds) on the quantile grid of X.
RatioScan scan_ratios(const ConditionalSlice& sl, const GridSpec& grid) {
  RatioScan out;
  const double s = sl.s();
  for (double u : grid_levels(grid)) {
    const double x = sl.mu1().quantile(u);
    const auto dx = dds_survival(sl, Axis::X, x);
    const auto dy = dds_survival(sl, Axis::Y, s - x);
    for (const auto& w : dy.warnings) out.warnings.push_back(w);
    const double den = dx.value + dy.value;
    if (!(std::abs(den) > kDegenerate)) {
      out.degenerate.push_back(x);
      continue;
    }
    const double r = std::clamp(dy.value / den, 0.0, 1.0);
    out.sup_r = std::max(out.sup_r, r);
    out.inf_r = std::min(out.inf_r, r);
    ++out.used;
  }
  if (out.used == 0) {
    out.sup_r = 1.0;
    out.inf_r = 0.0;
    out.warnings.push_back("every grid point is degenerate; bounds reduce to 0");
  }
  if (!out.degenerate.empty()) {
    std::ostringstream os;
    os << out.degenerate.size() << " degenerate grid point(s) skipped";
    out.warnings.push_back(os.str());
  }
  return out;
}

}  // namespace

BoundReport derivative_lower_bound(const JointModel2D& model, const PsiFunction& psi, double s0,
                                   const BoundOptions& opt) {
  if (!psi.differentiable) {
    throw Error(ErrorCode::BadParameter, psi.name + " is not differentiable; use a ramp surrogate");
  }
  validate(opt.grid);
  BoundReport rep;
  rep.s0 = s0;
  const auto reg = check_regularity(model, s0, &psi, opt.regularity);
  rep.warnings = reg.warnings;

  const ConditionalSlice sl(model, s0);
  rep.I_prime = efron_I_prime(sl, psi).value;
  const Measure1D& mu = sl.mu1();
  std::vector<double> splits = psi.kinks_x;
  for (double k : psi.kinks_y) splits.push_back(s0 - k);
  const RealFn2 d1 = psi.d1, d2 = psi.d2;
  rep.E_d1psi = mu.expectation([&](double x) { return d1(x, s0 - x); }, splits);
  rep.E_d2psi = mu.expectation([&](double x) { return d2(x, s0 - x); }, splits);

  const auto scan = scan_ratios(sl, opt.grid);
  rep.sup_ratio_x = scan.sup_r;
  rep.sup_ratio_y = 1.0 - scan.inf_r;
  rep.degenerate_points = scan.degenerate;
  rep.warnings.insert(rep.warnings.end(), scan.warnings.begin(), scan.warnings.end());
  rep.bound_x = (1.0 - rep.sup_ratio_x) * rep.E_d1psi;
  rep.bound_y = (1.0 - rep.sup_ratio_y) * rep.E_d2psi;
  rep.bound_mixed = std::max(rep.bound_x, rep.bound_y);

  rep.psi_monotone = psi.monotone_x && psi.monotone_y;
  rep.criterion_holds = criterion(sl, opt.grid).holds();
  rep.claimed = rep.psi_monotone && rep.criterion_holds;
  rep.satisfied = !rep.claimed || rep.I_prime >= rep.bound_mixed - opt.tolerance;
  if (!rep.psi_monotone) rep.warnings.push_back("Psi is not declared monotone; bound not claimed");
  if (!rep.criterion_holds) rep.warnings.push_back("criterion fails at s0; bound not claimed");
  return rep;
}

RegressionBound regression_bound(const JointModel2D& uz, const RealFn& psi_prime, double x, const BoundOptions& opt) {
  validate(opt.grid);
  RegressionBound out;
  out.warnings = check_regularity(uz, x, nullptr, opt.regularity).warnings;
  const ConditionalSlice sl(uz, x);
  out.E_psi_prime = sl.mu1().expectation(psi_prime);
  const auto scan = scan_ratios(sl, opt.grid);
  out.sup_ratio = scan.sup_r;
  out.warnings.insert(out.warnings.end(), scan.warnings.begin(), scan.warnings.end());
  out.bound = (1.0 - out.sup_ratio) * out.E_psi_prime;
  return out;
}

RegressionBound regression_bound(const Density1D& u, const Density1D& z, const RealFn& psi_prime, double x,
                                 const BoundOptions& opt) {
  return regression_bound(independent_model(u, z), psi_prime, x, opt);
}

}  // namespace efron
