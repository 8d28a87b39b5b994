#include "efron/efron.hpp"

#include <cmath>
#include <sstream>

#include "efron/error.hpp"

namespace efron {

namespace {

constexpr double kFormGapWarn = 1e-6;

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

// Split points on the y-axis for y -> Psi(s - y, y).
std::vector<double> psi_splits_y(const PsiFunction& psi, double s) {
  std::vector<double> out = psi.kinks_y;
  for (double k : psi.kinks_x) out.push_back(s - k);
  return out;
}

}  // namespace

double survival(const ConditionalSlice& slice, Axis axis, double threshold) {
  return axis == Axis::X ? slice.mu1().sf(threshold) : slice.mu2().sf(threshold);
}

SurvivalDerivative dds_survival(const ConditionalSlice& slice, Axis axis, double threshold) {
  const JointModel2D& m = slice.model();
  const double s = slice.s();
  SurvivalDerivative out;
  if (axis == Axis::X) {
    // phi_22 - phi_12 along the line; kinks in y become point masses at s - at.
    const auto g = [&m, s](double x) { return m.d22(x, s - x) - m.d12(x, s - x); };
    std::vector<double> ks;
    double jumps = 0.0;
    for (const auto& k : m.kinks_y) {
      ks.push_back(s - k.at);
      jumps += k.size * slice.mu1().kernel(threshold, s - k.at);
    }
    out.value = slice.mu1().kernel_integral(threshold, g, ks) + jumps;
    return out;
  }

  const double y = threshold;
  const auto g2 = [&m, s](double yp) { return m.d11(s - yp, yp) - m.d12(s - yp, yp); };
  const auto g1 = [&m, s](double v) { return m.d11(v, s - v) - m.d12(v, s - v); };
  std::vector<double> k2, k1;
  double j2 = 0.0, j1 = 0.0;
  for (const auto& k : m.kinks_x) {
    k2.push_back(s - k.at);
    k1.push_back(k.at);
    j2 += k.size * slice.mu2().kernel(y, s - k.at);
    j1 += k.size * slice.mu1().kernel(s - y, k.at);
  }
  out.value = slice.mu2().kernel_integral(y, g2, k2) + j2;
  out.alt_value = slice.mu1().kernel_integral(s - y, g1, k1) + j1;
  out.form_gap = std::abs(out.value - out.alt_value);
  if (out.form_gap > kFormGapWarn) {
    std::ostringstream os;
    os << "dS_Y/ds at y=" << y << ": kernel forms differ by " << out.form_gap;
    out.warnings.push_back(os.str());
  }
  return out;
}

SurvivalDerivative dds_survival(const JointModel2D& model, Axis axis, double threshold, double s0,
                                const RegularityOptions& opt) {
  const auto reg = check_regularity(model, s0, nullptr, opt);
  SurvivalDerivative out = dds_survival(ConditionalSlice(model, s0), axis, threshold);
  out.warnings.insert(out.warnings.begin(), reg.warnings.begin(), reg.warnings.end());
  return out;
}

DensitySum density_sum_identity(const ConditionalSlice& slice, double x) {
  DensitySum out;
  out.lhs = slice.mu1().pdf(x);
  const auto dx = dds_survival(slice, Axis::X, x);
  const auto dy = dds_survival(slice, Axis::Y, slice.s() - x);
  out.dds_x = dx.value;
  out.dds_y = dy.value;
  out.rhs = dx.value + dy.value;
  append(out.warnings, dy.warnings);
  return out;
}

DensitySum density_sum_identity(const JointModel2D& model, double s0, double x, const RegularityOptions& opt) {
  const auto reg = check_regularity(model, s0, nullptr, opt);
  DensitySum out = density_sum_identity(ConditionalSlice(model, s0), x);
  out.warnings.insert(out.warnings.begin(), reg.warnings.begin(), reg.warnings.end());
  return out;
}

double efron_I(const ConditionalSlice& slice, const PsiFunction& psi) {
  const double s = slice.s();
  const auto splits = psi_splits_y(psi, s);
  const RealFn2 v = psi.value;
  return slice.mu2().expectation([&v, s](double y) { return v(s - y, y); }, splits);
}

double efron_I(const JointModel2D& model, const PsiFunction& psi, double s) {
  return efron_I(ConditionalSlice(model, s), psi);
}

double efron_I_via_quantiles(const ConditionalSlice& slice, const PsiFunction& psi) {
  if (!psi.single_axis) {
    throw Error(ErrorCode::BadParameter,
                psi.name + ": the quantile route needs Psi of one variable (two-variable quantile pairing is a "
                           "comonotone coupling, not the conditional law)");
  }
  const bool on_x = *psi.single_axis == Axis::X;
  const Measure1D& mu = on_x ? slice.mu1() : slice.mu2();
  const auto& kinks = on_x ? psi.kinks_x : psi.kinks_y;
  std::vector<double> splits;
  for (double k : kinks) {
    const double u = mu.cdf(k);
    if (u > 0.0 && u < 1.0) splits.push_back(u);
  }
  // The quantile ladder keeps the tails resolved.
  for (double u : {1e-6, 1e-3, 0.5, 1.0 - 1e-3, 1.0 - 1e-6}) splits.push_back(u);
  const RealFn f = psi.single;
  return integrate_value([&](double u) { return f(mu.quantile(u)); }, Interval{0.0, 1.0}, QuadConfig{1e-10, 1e-12, 2000},
                         splits, "quantile transform");
}

double efron_I_via_quantiles(const JointModel2D& model, const PsiFunction& psi, double s) {
  return efron_I_via_quantiles(ConditionalSlice(model, s), psi);
}

IPrime efron_I_prime(const ConditionalSlice& slice, const PsiFunction& psi) {
  if (!psi.differentiable) {
    throw Error(ErrorCode::BadParameter, psi.name + " is not differentiable; use a ramp surrogate");
  }
  const JointModel2D& m = slice.model();
  const double s = slice.s();
  const auto splits = psi_splits_y(psi, s);
  const Measure1D& mu = slice.mu2();
  const RealFn2 v = psi.value, d1 = psi.d1;
  const double e_d1psi = mu.expectation([&](double y) { return d1(s - y, y); }, splits);
  const double e_psi = mu.expectation([&](double y) { return v(s - y, y); }, splits);
  const double e_dphi = mu.expectation([&](double y) { return m.d1(s - y, y); }, splits);
  const double cov = mu.expectation([&](double y) { return (v(s - y, y) - e_psi) * (m.d1(s - y, y) - e_dphi); }, splits);
  IPrime out;
  out.value = e_d1psi - cov;
  return out;
}

IPrime efron_I_prime(const JointModel2D& model, const PsiFunction& psi, double s0, const RegularityOptions& opt) {
  const auto reg = check_regularity(model, s0, &psi, opt);
  IPrime out = efron_I_prime(ConditionalSlice(model, s0), psi);
  out.warnings.insert(out.warnings.begin(), reg.warnings.begin(), reg.warnings.end());
  return out;
}

}  // namespace efron
