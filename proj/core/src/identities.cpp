#include "efron/identities.hpp"

#include <cmath>
#include <sstream>

#include "efron/error.hpp"

namespace efron {

namespace {

constexpr double kDivergent = 1e12;

// Integral that is expected to be finite; nullopt-like NaN when it looks divergent.
double finite_or_nan(const RealFn& f, Interval dom, std::span<const double> splits) {
  try {
    const auto r = integrate(f, dom, QuadConfig{1e-8, 1e-12, 2000}, splits);
    if (!r.converged && r.error_estimate > 1e-6 * std::max(1.0, std::abs(r.value))) return std::nan("");
    if (!(std::abs(r.value) < kDivergent)) return std::nan("");
    return r.value;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonFiniteEvaluation) return std::nan("");
    throw;
  }
}

}  // namespace

double cov_kernel_form(const Measure1D& m, const RealFn& a_prime, const RealFn& b_prime, std::span<const double> kinks) {
  const auto splits = m.splits_with(kinks);
  return integrate_value(
      [&](double x) {
        const double a = a_prime(x);
        if (a == 0.0) return 0.0;
        return a * m.kernel_integral(x, b_prime, kinks);
      },
      m.density().support, QuadConfig{1e-9, 1e-13, 2000}, splits, "kernel covariance");
}

double cov_direct(const Measure1D& m, const RealFn& a, const RealFn& b, std::span<const double> kinks) {
  const double ea = m.expectation(a, kinks);
  const double eb = m.expectation(b, kinks);
  return m.expectation([&](double x) { return (a(x) - ea) * (b(x) - eb); }, kinks);
}

IndicatorIdentity indicator_identity(const Measure1D& m, double z, const RealFn& b, const RealFn& b_prime,
                                     std::span<const PotentialJump> b_jumps, std::span<const double> kinks) {
  std::vector<double> ks(kinks.begin(), kinks.end());
  for (const auto& j : b_jumps) ks.push_back(j.at);
  const auto splits = m.splits_with(ks);
  const Interval sup = m.density().support;

  const double abs_b = finite_or_nan(
      [&](double y) {
        const double p = m.pdf(y);
        return p == 0.0 ? 0.0 : p * std::abs(b(y));
      },
      sup, splits);
  if (std::isnan(abs_b)) {
    throw Error(ErrorCode::HypothesisViolation, m.density().name + ": b is not integrable against F");
  }

  IndicatorIdentity out;
  out.z = z;
  const double tail = finite_or_nan(
      [&](double y) {
        const double F = m.cdf(y);
        const double g = std::sqrt(F * m.sf(y));
        return g == 0.0 ? 0.0 : g * std::abs(b_prime(y));
      },
      sup, splits);
  if (std::isnan(tail)) {
    out.tail_condition_ok = false;
    out.note = "b' not integrable against sqrt(F(1-F)); identity outside its covered range";
  }
  // Outside the covered range both sides are best effort: NaN instead of a throw.
  auto side = [&](auto&& compute) {
    if (out.tail_condition_ok) return compute();
    try {
      return compute();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonConvergence && e.code() != ErrorCode::NonFiniteEvaluation) throw;
      return std::nan("");
    }
  };

  const double Fz = m.cdf(z);
  out.survival = m.sf(z);
  out.lhs = side([&] {
    const double eb = m.expectation(b, ks);
    double below = 0.0;
    if (z > sup.lo) {
      std::vector<double> sp;
      for (double v : splits) {
        if (v < z) sp.push_back(v);
      }
      const Interval dom{sup.lo, std::min(z, sup.hi)};
      below = integrate_value(
                  [&](double y) {
                    const double p = m.pdf(y);
                    return p == 0.0 ? 0.0 : p * b(y);
                  },
                  dom, QuadConfig{1e-11, 1e-14, 2000}, sp, "indicator identity") /
              m.raw_mass();
    }
    return Fz * eb - below;
  });
  out.rhs = side([&] {
    double jumps = 0.0;
    for (const auto& j : b_jumps) jumps += j.size * m.kernel(z, j.at);
    return m.kernel_integral(z, b_prime, ks) + jumps;
  });
  return out;
}

std::string density_recovery_violation(const Measure1D& m) {
  const Density1D& d = m.density();
  const double scale = std::max(1.0, m.quantile(0.75) - m.quantile(0.25));
  // The density has to vanish at a finite end: the potential must climb
  // noticeably between 1e-6 and 1e-12 (relative) from the boundary.
  for (bool upper : {false, true}) {
    if (upper ? !d.support.upper_finite() : !d.support.lower_finite()) continue;
    const double e = upper ? d.support.hi : d.support.lo;
    const double sgn = upper ? -1.0 : 1.0;
    const double near = d.phi(e + sgn * 1e-12 * scale);
    const double far = d.phi(e + sgn * 1e-6 * scale);
    if (!(near - far > 0.1)) {
      std::ostringstream os;
      os << d.name << ": density does not vanish at the endpoint " << e;
      return os.str();
    }
  }
  const double l1 = finite_or_nan(
      [&](double y) {
        const double p = m.pdf(y);
        return p == 0.0 ? 0.0 : p * std::abs(d.dphi(y));
      },
      d.support, m.breakpoints());
  if (std::isnan(l1)) return d.name + ": phi' is not integrable against f";
  return {};
}

double density_recovery(const Measure1D& m, double x) {
  const auto why = density_recovery_violation(m);
  if (!why.empty()) throw Error(ErrorCode::HypothesisViolation, why);
  const Density1D& d = m.density();
  const auto kinks = d.kink_points();
  double jumps = 0.0;
  for (const auto& k : d.kinks) jumps += k.size * m.kernel(x, k.at);
  return m.kernel_integral(x, d.d2phi, kinks) + jumps;
}

}  // namespace efron
