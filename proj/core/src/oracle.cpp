#include "efron/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "efron/error.hpp"
#include "efron/parse.hpp"

namespace efron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  double x;
  double w;
};

std::vector<Node> trapezoid_nodes(double a, double b, std::span<const double> splits, int n) {
  std::vector<Node> out;
  if (!(b > a)) return out;
  std::vector<double> cuts{a};
  for (double c : splits) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double len = b - a;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    const int m = std::max(3, static_cast<int>(std::lround(n * (hi - lo) / len)));
    const double h = (hi - lo) / (m - 1);
    // Segment ends are sampled just inside, so a jump at a cut gets its one-sided limits.
    auto inset = [h](double x) { return std::min(1e-12 * std::max(1.0, std::abs(x)), 1e-3 * h); };
    for (int i = 0; i < m; ++i) {
      double x = lo + i * h;
      if (i == 0) x = lo + inset(lo);
      if (i == m - 1) x = hi - inset(hi);
      out.push_back({x, (i == 0 || i == m - 1) ? 0.5 * h : h});
    }
  }
  return out;
}

double nudge_in(double e, bool lower) {
  const double d = 1e-12 * std::max(1.0, std::abs(e));
  return lower ? e + d : e - d;
}

// The line x + y = s parametrised by the coordinate of `axis`.
struct Line {
  const JointModel2D* m;
  double s;
  bool on_x;

  double phi(double t) const {
    const double x = on_x ? t : s - t;
    const double y = on_x ? s - t : t;
    if (!m->in_support(x, y)) return kInf;
    return m->phi(x, y);
  }
  Interval range() const {
    const Interval own = on_x ? m->support_x : m->support_y;
    const Interval other = on_x ? m->support_y : m->support_x;
    return Interval{std::max(own.lo, s - other.hi), std::min(own.hi, s - other.lo)};
  }
  std::vector<double> kinks() const {
    std::vector<double> out;
    for (const auto& k : on_x ? m->kinks_x : m->kinks_y) out.push_back(k.at);
    for (const auto& k : on_x ? m->kinks_y : m->kinks_x) out.push_back(s - k.at);
    return out;
  }
};

[[noreturn]] void empty_slice(const JointModel2D& m, double s) {
  std::ostringstream os;
  os << m.spec << ": the line x + y = " << s << " carries no mass";
  throw Error(ErrorCode::EmptySlice, os.str());
}

Interval line_window(const Line& line, double trunc) {
  const Interval r = line.range();
  if (!(r.lo < r.hi)) empty_slice(*line.m, line.s);
  const double hint = std::isfinite(r.lo) && std::isfinite(r.hi) ? 0.5 * (r.lo + r.hi)
                      : std::isfinite(r.lo)                      ? r.lo + 1.0
                      : std::isfinite(r.hi)                      ? r.hi - 1.0
                                                                 : 0.5 * line.s;
  return truncation_window([&line](double t) { return line.phi(t); }, r, trunc, hint);
}

// Ratio of trapezoid sums of w g and w on the window.
struct Sums {
  double num = 0.0;
  double den = 0.0;
};

Sums line_sums(const Line& line, Interval win, const std::function<double(double)>& g, std::span<const double> extra,
               int n) {
  std::vector<double> splits = line.kinks();
  splits.insert(splits.end(), extra.begin(), extra.end());
  const auto nodes = trapezoid_nodes(win.lo, win.hi, splits, n);
  double ref = kInf;
  for (const auto& nd : nodes) ref = std::min(ref, line.phi(nd.x));
  if (!std::isfinite(ref)) empty_slice(*line.m, line.s);
  Sums out;
  for (const auto& nd : nodes) {
    const double p = line.phi(nd.x);
    if (!std::isfinite(p)) continue;
    const double w = nd.w * std::exp(ref - p);
    out.den += w;
    out.num += w * g(nd.x);
  }
  return out;
}

}  // namespace

void validate(const GridOracleConfig& cfg) {
  if (cfg.n_points < 101) throw Error(ErrorCode::BadParameter, "oracle grid needs n_points >= 101");
  if (!(cfg.truncation_mass > 0.0 && cfg.truncation_mass < 1e-3)) {
    throw Error(ErrorCode::BadParameter, "oracle truncation_mass must lie in (0, 1e-3)");
  }
}

double trapezoid(const RealFn& g, double a, double b, std::span<const double> splits, int n) {
  double sum = 0.0;
  for (const auto& nd : trapezoid_nodes(a, b, splits, n)) sum += nd.w * g(nd.x);
  return sum;
}

Interval truncation_window(const RealFn& phi, Interval range, double trunc, double centre_hint) {
  const double cut = -std::log(trunc);
  auto inside = [&](double t) { return t > range.lo && t < range.hi; };
  // Coarse scan for the smallest potential.
  std::vector<double> probes;
  if (std::isfinite(range.lo) && std::isfinite(range.hi)) {
    for (int i = 1; i < 256; ++i) probes.push_back(range.lo + (range.hi - range.lo) * i / 256.0);
  }
  for (int k = -10; k <= 40; ++k) {
    probes.push_back(centre_hint + std::ldexp(1.0, k));
    probes.push_back(centre_hint - std::ldexp(1.0, k));
  }
  probes.push_back(centre_hint);
  double c = std::nan(""), pmin = kInf;
  for (double t : probes) {
    if (!inside(t)) continue;
    const double p = phi(t);
    if (p < pmin) {
      pmin = p;
      c = t;
    }
  }
  if (!std::isfinite(pmin)) throw Error(ErrorCode::EmptySlice, "no positive density on the window scan");

  const double step0 = 1e-3 * std::max(1.0, std::abs(c));
  auto walk = [&](double dir) {
    double step = step0;
    for (int it = 0; it < 2000; ++it) {
      const double t = c + dir * step;
      if (!inside(t)) return nudge_in(dir < 0 ? range.lo : range.hi, dir < 0);
      const double p = phi(t);
      if (p - pmin > cut) return t;
      pmin = std::min(pmin, p);
      step *= 2.0;
    }
    throw Error(ErrorCode::NonConvergence, "truncation window did not close");
  };
  const double a = walk(-1.0);
  const double b = walk(1.0);
  return Interval{a, b};
}

double grid_conditional_expectation(const JointModel2D& model, const PsiFunction& psi, double s,
                                    const GridOracleConfig& cfg) {
  validate(cfg);
  const Line line{&model, s, true};
  const Interval win = line_window(line, cfg.truncation_mass);
  std::vector<double> extra = psi.kinks_x;
  for (double k : psi.kinks_y) extra.push_back(s - k);
  const RealFn2 v = psi.value;
  const auto sums = line_sums(line, win, [&](double x) { return v(x, s - x); }, extra, cfg.n_points);
  if (!(sums.den > 0.0)) empty_slice(model, s);
  return sums.num / sums.den;
}

double grid_survival(const JointModel2D& model, Axis axis, double threshold, double s, const GridOracleConfig& cfg) {
  validate(cfg);
  const Line line{&model, s, axis == Axis::X};
  const Interval win = line_window(line, cfg.truncation_mass);
  const double t = threshold;
  const auto sums = line_sums(line, win, [t](double u) { return u > t ? 1.0 : 0.0; }, std::span<const double>(&t, 1),
                              cfg.n_points);
  if (!(sums.den > 0.0)) empty_slice(model, s);
  return sums.num / sums.den;
}

double grid_survival_derivative(const JointModel2D& model, Axis axis, double threshold, double s0,
                                const GridOracleConfig& cfg) {
  validate(cfg);
  const double eps = 1e-3 * std::max(1.0, std::abs(s0));
  const Line base{&model, s0, axis == Axis::X};
  const Interval r0 = base.range();
  const Interval w0 = line_window(base, cfg.truncation_mass);
  // A window end that sits on a range end follows the range.
  const bool lo_follows = std::isfinite(r0.lo) && w0.lo <= nudge_in(r0.lo, true);
  const bool hi_follows = std::isfinite(r0.hi) && w0.hi >= nudge_in(r0.hi, false);
  const double t = threshold;
  auto surv = [&](double s) {
    const Line line{&model, s, axis == Axis::X};
    const Interval r = line.range();
    Interval win = w0;
    if (lo_follows) win.lo = nudge_in(r.lo, true);
    if (hi_follows) win.hi = nudge_in(r.hi, false);
    win.lo = std::max(win.lo, nudge_in(r.lo, true));
    win.hi = std::min(win.hi, nudge_in(r.hi, false));
    const auto sums =
        line_sums(line, win, [t](double u) { return u > t ? 1.0 : 0.0; }, std::span<const double>(&t, 1), cfg.n_points);
    if (!(sums.den > 0.0)) empty_slice(model, s);
    return sums.num / sums.den;
  };
  return (surv(s0 + eps) - surv(s0 - eps)) / (2.0 * eps);
}

MultiPsi multi_constant(double c) {
  MultiPsi p;
  p.name = "const(" + format_number(c) + ")";
  p.value = [c](double, double, double) { return c; };
  p.monotone = {true, true, true};
  return p;
}

MultiPsi multi_indicator(int coordinate, double c) {
  if (coordinate < 0 || coordinate > 2) throw Error(ErrorCode::BadParameter, "coordinate must be 0, 1 or 2");
  MultiPsi p;
  p.name = "indicator(x" + std::to_string(coordinate + 1) + ">" + format_number(c) + ")";
  p.value = [coordinate, c](double a, double b, double d) {
    const double v = coordinate == 0 ? a : coordinate == 1 ? b : d;
    return v > c ? 1.0 : 0.0;
  };
  p.kinks[static_cast<std::size_t>(coordinate)] = {c};
  p.monotone = {true, true, true};
  return p;
}

MultiPsi multi_linear(std::array<double, 3> a) {
  MultiPsi p;
  p.name = "linear(" + format_number(a[0]) + "," + format_number(a[1]) + "," + format_number(a[2]) + ")";
  p.value = [a](double x, double y, double z) { return a[0] * x + a[1] * y + a[2] * z; };
  p.monotone = {a[0] >= 0.0, a[1] >= 0.0, a[2] >= 0.0};
  return p;
}

std::vector<double> efron_I_multi(const std::array<Density1D, 3>& d, const MultiPsi& psi,
                                  std::span<const double> s_grid, const GridOracleConfig& cfg) {
  validate(cfg);
  for (const auto& g : d) {
    if (!g.log_concave_hint) throw Error(ErrorCode::BadParameter, g.name + " is not marked log-concave");
  }
  std::array<Interval, 3> win;
  std::array<double, 3> ref{};
  std::array<std::vector<double>, 3> kinks;
  for (std::size_t i = 0; i < 3; ++i) {
    const Interval sup = d[i].support;
    const double hint = std::isfinite(sup.lo) && std::isfinite(sup.hi) ? 0.5 * (sup.lo + sup.hi)
                        : std::isfinite(sup.lo)                        ? sup.lo + 1.0
                        : std::isfinite(sup.hi)                        ? sup.hi - 1.0
                                                                       : 0.0;
    win[i] = truncation_window(d[i].phi, sup, cfg.truncation_mass, hint);
    ref[i] = kInf;
    for (const auto& nd : trapezoid_nodes(win[i].lo, win[i].hi, {}, 257)) ref[i] = std::min(ref[i], d[i].phi(nd.x));
    kinks[i] = psi.kinks[i];
    for (double k : d[i].kink_points()) kinks[i].push_back(k);
  }
  const int n = cfg.n_points;
  auto pdf = [&](std::size_t i, double x) {
    if (!(x > d[i].support.lo && x < d[i].support.hi)) return 0.0;
    return std::exp(ref[i] - d[i].phi(x));
  };

  std::vector<double> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) {
    const double a1 = std::max(win[0].lo, s - win[1].hi - win[2].hi);
    const double b1 = std::min(win[0].hi, s - win[1].lo - win[2].lo);
    if (!(a1 < b1)) {
      std::ostringstream os;
      os << "simplex slice at s=" << s << " misses the truncation windows";
      throw Error(ErrorCode::EmptySlice, os.str());
    }
    double num = 0.0, den = 0.0;
    for (const auto& o : trapezoid_nodes(a1, b1, kinks[0], n)) {
      const double x1 = o.x;
      const double g1 = pdf(0, x1);
      if (g1 == 0.0) continue;
      const double r = s - x1;
      const double a2 = std::max(win[1].lo, r - win[2].hi);
      const double b2 = std::min(win[1].hi, r - win[2].lo);
      if (!(a2 < b2)) continue;
      std::vector<double> sp = kinks[1];
      for (double k : kinks[2]) sp.push_back(r - k);
      double in_num = 0.0, in_den = 0.0;
      for (const auto& i : trapezoid_nodes(a2, b2, sp, n)) {
        const double x3 = r - i.x;
        const double w = i.w * pdf(1, i.x) * pdf(2, x3);
        in_den += w;
        in_num += w * psi.value(x1, i.x, x3);
      }
      num += o.w * g1 * in_num;
      den += o.w * g1 * in_den;
    }
    if (!(den > 0.0)) throw Error(ErrorCode::EmptySlice, "no mass on the simplex slice");
    out.push_back(num / den);
  }
  return out;
}

}  // namespace efron
