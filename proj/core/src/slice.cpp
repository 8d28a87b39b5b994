#include "efron/slice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "efron/error.hpp"
#include "efron/parse.hpp"

namespace efron {

namespace {

// Parametrises the line by the coordinate named in `axis`: t -> (t, s-t) for
// X and (s-t, t) for Y.
ConditionalSlice::Side build_side(const JointModel2D& m, double s, Axis axis) {
  const bool on_x = axis == Axis::X;
  const Interval own = on_x ? m.support_x : m.support_y;
  const Interval other = on_x ? m.support_y : m.support_x;
  const double lo_other = s - other.hi;
  const double hi_other = s - other.lo;
  ConditionalSlice::Side side;
  const double lo = std::max(own.lo, lo_other);
  const double hi = std::min(own.hi, hi_other);
  side.lo_moves = std::isfinite(other.hi) && lo_other >= own.lo;
  side.hi_moves = std::isfinite(other.lo) && hi_other <= own.hi;
  if (!(lo < hi)) {
    std::ostringstream os;
    os << m.spec << ": the line x + y = " << s << " misses the support";
    throw Error(ErrorCode::EmptySlice, os.str());
  }

  auto pt = [on_x, s](double t) { return on_x ? std::pair{t, s - t} : std::pair{s - t, t}; };
  const RealFn2 phi = m.phi;
  auto phi_line = [phi, pt](double t) {
    const auto [x, y] = pt(t);
    return phi(x, y);
  };

  // Scan for the smallest potential so the normaliser integrand peaks near 1.
  double ref = std::numeric_limits<double>::infinity();
  double arg = 0.5 * (lo + hi);
  const double centre = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi)
                        : std::isfinite(lo)                    ? lo
                        : std::isfinite(hi)                    ? hi
                                                               : 0.5 * s;
  const double scale = std::max(1.0, std::abs(s));
  for (int i = 1; i < 512; ++i) {
    const double u = static_cast<double>(i) / 512.0;
    double t = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      t = lo + (hi - lo) * u;
    } else if (std::isfinite(lo)) {
      t = lo + scale * u / (1.0 - u);
    } else if (std::isfinite(hi)) {
      t = hi - scale * u / (1.0 - u);
    } else {
      const double v = 2.0 * u - 1.0;
      t = centre + scale * v / (1.0 - v * v);
    }
    if (!(t > lo && t < hi)) continue;
    const double v = phi_line(t);
    if (std::isfinite(v) && v < ref) {
      ref = v;
      arg = t;
    }
  }
  if (!std::isfinite(ref)) {
    std::ostringstream os;
    os << m.spec << ": zero density along x + y = " << s;
    throw Error(ErrorCode::EmptySlice, os.str());
  }

  std::vector<PotentialJump> kinks;
  const auto& own_k = on_x ? m.kinks_x : m.kinks_y;
  const auto& other_k = on_x ? m.kinks_y : m.kinks_x;
  for (const auto& k : own_k) kinks.push_back({k.at, k.size});
  for (const auto& k : other_k) kinks.push_back({s - k.at, k.size});
  std::vector<double> splits{arg};
  for (const auto& k : kinks) splits.push_back(k.at);
  for (double v : on_x ? m.hints_x : m.hints_y) splits.push_back(v);
  for (double v : on_x ? m.hints_y : m.hints_x) splits.push_back(s - v);

  const double z = integrate_value(
      [&](double t) {
        const double v = phi_line(t);
        return std::isfinite(v) ? std::exp(ref - v) : 0.0;
      },
      Interval{lo, hi}, QuadConfig{1e-12, 1e-15, 4000}, splits, "slice normaliser");
  if (!(z > 0.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << m.spec << ": no mass along x + y = " << s;
    throw Error(ErrorCode::EmptySlice, os.str());
  }
  const double J = std::log(z) - ref;
  side.log_norm = J;

  Density1D& d = side.density;
  d.name = m.spec + (on_x ? " | X, s=" : " | Y, s=") + format_number(s);
  d.support = Interval{lo, hi};
  d.kinks = kinks;
  d.phi = [phi_line, J](double t) { return phi_line(t) + J; };
  const RealFn2 a1 = on_x ? m.d1 : m.d2;
  const RealFn2 a2 = on_x ? m.d2 : m.d1;
  d.dphi = [a1, a2, pt](double t) {
    const auto [x, y] = pt(t);
    return a1(x, y) - a2(x, y);
  };
  const RealFn2 d11 = m.d11, d12 = m.d12, d22 = m.d22;
  d.d2phi = [d11, d12, d22, pt](double t) {
    const auto [x, y] = pt(t);
    return d11(x, y) - 2.0 * d12(x, y) + d22(x, y);
  };
  return side;
}

}  // namespace

ConditionalSlice::ConditionalSlice(const JointModel2D& model, double s)
    : ConditionalSlice(model, s, build_side(model, s, Axis::X), build_side(model, s, Axis::Y)) {}

ConditionalSlice::ConditionalSlice(const JointModel2D& model, double s, Side x_side, Side y_side)
    : model_(model),
      s_(s),
      j1_(x_side.log_norm),
      j2_(y_side.log_norm),
      lo_moves_(x_side.lo_moves),
      hi_moves_(x_side.hi_moves),
      mu1_(std::move(x_side.density)),
      mu2_(std::move(y_side.density)) {}

double ConditionalSlice::Z1() const { return std::exp(j1_); }

}  // namespace efron
