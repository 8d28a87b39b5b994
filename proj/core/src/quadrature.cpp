#include "efron/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "efron/error.hpp"

namespace efron {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

// QUADPACK qk21 abscissae (positive half) and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525450764, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss 10-point weights for kXgk[1], kXgk[3], ..., kXgk[9].
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

enum class MapKind { Affine, UpperInf, LowerInf, BothInf };

// One piece of the domain and the change of variable that makes it finite.
struct Piece {
  MapKind kind;
  double anchor;  // finite end for the half-infinite maps
  double t_lo;
  double t_hi;
};

struct Segment {
  int piece;
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

class Evaluator {
 public:
  Evaluator(const RealFn& f, const std::vector<Piece>& pieces) : f_(f), pieces_(pieces) {}

  double operator()(int piece, double t) {
    ++count_;
    const Piece& p = pieces_[static_cast<std::size_t>(piece)];
    double x = t;
    double jac = 1.0;
    switch (p.kind) {
      case MapKind::Affine:
        break;
      case MapKind::UpperInf: {
        const double d = 1.0 - t;
        x = p.anchor + t / d;
        jac = 1.0 / (d * d);
        break;
      }
      case MapKind::LowerInf: {
        const double d = 1.0 - t;
        x = p.anchor - t / d;
        jac = 1.0 / (d * d);
        break;
      }
      case MapKind::BothInf: {
        const double d = 1.0 - t * t;
        x = t / d;
        jac = (1.0 + t * t) / (d * d);
        break;
      }
    }
    if (!std::isfinite(x) || !std::isfinite(jac)) return 0.0;  // t rounded onto an infinite end
    const double fx = f_(x);
    if (fx == 0.0) return 0.0;
    if (!std::isfinite(fx)) {
      std::ostringstream os;
      os << "integrand returned " << fx << " at x = " << x;
      throw Error(ErrorCode::NonFiniteEvaluation, os.str());
    }
    return fx * jac;
  }

  int count() const { return count_; }

 private:
  const RealFn& f_;
  const std::vector<Piece>& pieces_;
  int count_ = 0;
};

template <class Eval>
PanelResult gk21(Eval&& eval, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = eval(center);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = eval(center - dx);
    f2[j] = eval(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (std::size_t j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  }
  const double h = std::abs(half);
  resk *= half;
  resabs *= h;
  resasc *= h;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  return PanelResult{resk, err};
}

Segment gauss_kronrod21(Evaluator& eval, int piece, double a, double b) {
  const PanelResult r = gk21([&](double t) { return eval(piece, t); }, a, b);
  return Segment{piece, a, b, r.value, r.error};
}

double checked(const RealFn& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "integrand returned " << v << " at x = " << x;
    throw Error(ErrorCode::NonFiniteEvaluation, os.str());
  }
  return v;
}

std::vector<Piece> build_pieces(Interval domain, std::span<const double> split_points) {
  std::vector<double> cuts;
  for (double p : split_points) {
    if (std::isfinite(p) && p > domain.lo && p < domain.hi) cuts.push_back(p);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Piece> pieces;
  if (cuts.empty() && !domain.lower_finite() && !domain.upper_finite()) {
    pieces.push_back({MapKind::BothInf, 0.0, -1.0, 1.0});
    return pieces;
  }
  if (cuts.empty() && !domain.lower_finite()) {
    pieces.push_back({MapKind::LowerInf, domain.hi, 0.0, 1.0});
    return pieces;
  }
  if (cuts.empty() && !domain.upper_finite()) {
    pieces.push_back({MapKind::UpperInf, domain.lo, 0.0, 1.0});
    return pieces;
  }
  std::vector<double> knots;
  knots.push_back(domain.lo);
  knots.insert(knots.end(), cuts.begin(), cuts.end());
  knots.push_back(domain.hi);
  if (!domain.lower_finite() && !domain.upper_finite() && knots.size() == 2) {
    knots.insert(knots.begin() + 1, 0.0);
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    if (std::isinf(a)) {
      pieces.push_back({MapKind::LowerInf, b, 0.0, 1.0});
    } else if (std::isinf(b)) {
      pieces.push_back({MapKind::UpperInf, a, 0.0, 1.0});
    } else {
      pieces.push_back({MapKind::Affine, 0.0, a, b});
    }
  }
  return pieces;
}

double target(const QuadConfig& cfg, double value) {
  return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
}

}  // namespace

bool Interval::lower_finite() const { return std::isfinite(lo); }
bool Interval::upper_finite() const { return std::isfinite(hi); }

Interval make_interval(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    std::ostringstream os;
    os << "interval requires lo < hi, got [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::BadParameter, os.str());
  }
  return Interval{lo, hi};
}

void validate(const QuadConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || cfg.max_subdivisions < 1) {
    throw Error(ErrorCode::BadParameter, "QuadConfig needs rel_tol > 0, abs_tol > 0, max_subdivisions >= 1");
  }
}

QuadResult integrate(const RealFn& f, Interval domain, const QuadConfig& cfg,
                     std::span<const double> split_points) {
  validate(cfg);
  domain = make_interval(domain.lo, domain.hi);
  const std::vector<Piece> pieces = build_pieces(domain, split_points);
  Evaluator eval(f, pieces);

  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;  // too narrow to bisect further
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Segment s = gauss_kronrod21(eval, static_cast<int>(i), pieces[i].t_lo, pieces[i].t_hi);
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  int subdivisions = 0;
  while (!heap.empty() && total_err > target(cfg, total) && subdivisions < cfg.max_subdivisions) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double scale = std::max({std::abs(worst.a), std::abs(worst.b), kTiny});
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 8.0 * kEps * scale) {
      frozen.push_back(worst);
      continue;
    }
    Segment left = gauss_kronrod21(eval, worst.piece, worst.a, mid);
    Segment right = gauss_kronrod21(eval, worst.piece, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum to remove drift from the running updates.
  double value = 0.0;
  double err = 0.0;
  for (const Segment& s : frozen) {
    value += s.value;
    err += s.error;
  }
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  QuadResult r;
  r.value = value;
  r.error_estimate = err;
  r.converged = err <= target(cfg, value);
  r.evaluations = eval.count();
  return r;
}

double integrate_value(const RealFn& f, Interval domain, const QuadConfig& cfg,
                       std::span<const double> split_points, const char* what) {
  const QuadResult r = integrate(f, domain, cfg, split_points);
  if (!r.converged) {
    const double slack = 1e4 * target(cfg, r.value);
    if (r.error_estimate > slack && r.error_estimate > 1e-10) {
      std::ostringstream os;
      os << what << ": error estimate " << r.error_estimate << " for value " << r.value
         << " after " << cfg.max_subdivisions << " subdivisions";
      throw Error(ErrorCode::NonConvergence, os.str());
    }
  }
  return r.value;
}

QuadResult integrate_upto(const RealFn& f, double x, Interval domain, const QuadConfig& cfg,
                          std::span<const double> split_points) {
  if (std::isnan(x) || x < domain.lo || x > domain.hi) {
    std::ostringstream os;
    os << "integrate_upto: x = " << x << " outside [" << domain.lo << ", " << domain.hi << "]";
    throw Error(ErrorCode::BadParameter, os.str());
  }
  if (x == domain.lo) {
    validate(cfg);
    return QuadResult{};
  }
  return integrate(f, Interval{domain.lo, x}, cfg, split_points);
}

PanelResult kronrod21(const RealFn& f, double a, double b) {
  return gk21([&](double x) { return checked(f, x); }, a, b);
}

double gauss10(const RealFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    const double dx = half * kXgk[2 * j + 1];
    sum += kWg[j] * (checked(f, center - dx) + checked(f, center + dx));
  }
  return sum * half;
}

double finite_diff(const RealFn& f, double x, int order, double h) {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::BadParameter, "finite_diff order must be 1 or 2");
  }
  if (!(h > 0.0)) {
    h = order == 1 ? std::max(1e-5, 1e-5 * std::abs(x))
                   : std::pow(kEps, 1.0 / 6.0) * std::max(1.0, std::abs(x));
  }
  const double fm2 = f(x - 2.0 * h);
  const double fm1 = f(x - h);
  const double fp1 = f(x + h);
  const double fp2 = f(x + 2.0 * h);
  double d = 0.0;
  if (order == 1) {
    d = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  } else {
    const double f0 = f(x);
    d = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
  }
  if (!std::isfinite(d)) {
    std::ostringstream os;
    os << "finite_diff: non-finite evaluation near x = " << x;
    throw Error(ErrorCode::NonFiniteEvaluation, os.str());
  }
  return d;
}

}  // namespace efron
