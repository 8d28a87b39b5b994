#include "efron/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "efron/error.hpp"

namespace efron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Map { Affine, Upper, Lower, Both };

// Bijection between the support and a bounded t-interval.
struct Chart {
  Map kind = Map::Both;
  double lo = -kInf;
  double hi = kInf;
  double c = 0.0;
  double w = 1.0;

  double t_min() const { return kind == Map::Lower || kind == Map::Both ? -1.0 : 0.0; }
  double t_max() const { return kind == Map::Lower ? 0.0 : 1.0; }

  double x_of(double t) const {
    switch (kind) {
      case Map::Affine: return lo + (hi - lo) * t;
      case Map::Upper: return lo + w * t / (1.0 - t);
      case Map::Lower: return hi + w * t / (1.0 + t);
      case Map::Both: return c + w * t / (1.0 - t * t);
    }
    return 0.0;
  }

  double jac(double t) const {
    switch (kind) {
      case Map::Affine: return hi - lo;
      case Map::Upper: return w / ((1.0 - t) * (1.0 - t));
      case Map::Lower: return w / ((1.0 + t) * (1.0 + t));
      case Map::Both: {
        const double d = 1.0 - t * t;
        return w * (1.0 + t * t) / (d * d);
      }
    }
    return 0.0;
  }

  double t_of(double x) const {
    switch (kind) {
      case Map::Affine: return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
      case Map::Upper: {
        const double u = (x - lo) / w;
        return u / (1.0 + u);
      }
      case Map::Lower: {
        const double u = (x - hi) / w;
        return u / (1.0 - u);
      }
      case Map::Both: {
        const double u = (x - c) / w;
        if (std::isinf(u)) return u > 0 ? 1.0 : -1.0;
        if (std::abs(u) <= 1.0) return 2.0 * u / (1.0 + std::sqrt(1.0 + 4.0 * u * u));
        const double r = 1.0 / u;  // keeps 4u^2 from overflowing
        return 2.0 / (r + std::copysign(std::sqrt(r * r + 4.0), u));
      }
    }
    return 0.0;
  }
};

Chart base_chart(const Interval& s) {
  Chart ch;
  ch.lo = s.lo;
  ch.hi = s.hi;
  if (s.lower_finite() && s.upper_finite()) {
    ch.kind = Map::Affine;
  } else if (s.lower_finite()) {
    ch.kind = Map::Upper;
  } else if (s.upper_finite()) {
    ch.kind = Map::Lower;
  } else {
    ch.kind = Map::Both;
  }
  return ch;
}

}  // namespace

struct Measure1D::Table {
  Density1D density;
  Chart chart;
  std::vector<double> t;      // panel edges
  std::vector<double> mass;   // normalised panel masses
  std::vector<double> left;   // left[k] = sum of mass[j], j < k
  std::vector<double> right;  // right[k] = sum of mass[j], j >= k
  double total = 0.0;
  double median = 0.0;
  std::vector<double> breaks;

  double integrand(double tt) const {
    const double x = chart.x_of(tt);
    if (!std::isfinite(x) || !(x > density.support.lo && x < density.support.hi)) return 0.0;
    const double p = density.pdf(x);
    if (p == 0.0) return 0.0;
    return p * chart.jac(tt);
  }

  double gl(double a, double b) const {
    if (a == b) return 0.0;
    return gauss10([this](double u) { return integrand(u); }, a, b) / total;
  }

  std::size_t locate(double tt) const {
    auto it = std::upper_bound(t.begin(), t.end(), tt);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - t.begin() - 1));
    return std::min(k, mass.size() - 1);
  }

  // (F, 1 - F) at t, each accumulated from its own tail.
  std::pair<double, double> both_sides(double tt) const {
    const std::size_t k = locate(tt);
    double p = 0.0;
    double q = 0.0;
    if (tt - t[k] <= t[k + 1] - tt) {
      p = gl(t[k], tt);
      q = mass[k] - p;
    } else {
      q = gl(tt, t[k + 1]);
      p = mass[k] - q;
    }
    return {std::clamp(left[k] + p, 0.0, 1.0), std::clamp(right[k + 1] + q, 0.0, 1.0)};
  }
};

namespace {

// Quartiles from a trapezoid pass on a uniform t-grid; used only to pick the
// chart's centre and scale.
bool rough_quartiles(const Density1D& d, const Chart& ch, double q[3]) {
  const int n = 4000;
  const double a = ch.t_min();
  const double b = ch.t_max();
  std::vector<double> cum(n + 1, 0.0);
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double tt = a + (b - a) * i / n;
    double v = 0.0;
    if (i < n) {
      const double x = ch.x_of(tt);
      if (std::isfinite(x) && x > d.support.lo && x < d.support.hi) {
        const double p = d.pdf(x);
        v = std::isfinite(p) ? p * ch.jac(tt) : 0.0;
      }
    }
    cum[i] = cum[i - 1] + 0.5 * (prev + v);
    prev = v;
  }
  const double total = cum[n];
  if (!(total > 0.0) || !std::isfinite(total)) return false;
  const double probs[3] = {0.25, 0.5, 0.75};
  for (int j = 0; j < 3; ++j) {
    const double target = probs[j] * total;
    auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const auto i = std::max<std::ptrdiff_t>(1, it - cum.begin());
    const double frac = (target - cum[i - 1]) / std::max(cum[i] - cum[i - 1], 1e-300);
    q[j] = ch.x_of(a + (b - a) * (static_cast<double>(i - 1) + frac) / n);
  }
  return true;
}

}  // namespace

Measure1D::Measure1D(Density1D density) {
  auto tab = std::make_shared<Table>();
  tab->density = std::move(density);
  const Density1D& d = tab->density;
  if (!d.phi) throw Error(ErrorCode::BadParameter, "Measure1D: density without potential");
  Chart ch = base_chart(d.support);

  if (ch.kind != Map::Affine) {
    for (int pass = 0; pass < 3; ++pass) {
      double q[3];
      if (!rough_quartiles(d, ch, q)) {
        throw Error(ErrorCode::NormalizationFailure, d.name + ": no visible mass on the support");
      }
      double w = ch.w;
      switch (ch.kind) {
        case Map::Both:
          ch.c = q[1];
          w = (q[2] - q[0]) / 1.349;
          break;
        case Map::Upper: w = q[1] - ch.lo; break;
        case Map::Lower: w = ch.hi - q[1]; break;
        case Map::Affine: break;
      }
      if (!(w > 0.0) || !std::isfinite(w)) break;
      const bool settled = std::abs(std::log(w / ch.w)) < 0.5;
      ch.w = w;
      if (settled) break;
    }
  }
  tab->chart = ch;

  // Initial uniform panels plus kink positions as fixed edges.
  std::vector<double> edges;
  const int n0 = 128;
  for (int i = 0; i <= n0; ++i) edges.push_back(ch.t_min() + (ch.t_max() - ch.t_min()) * i / n0);
  for (const auto& k : d.kinks) {
    if (k.at > d.support.lo && k.at < d.support.hi) edges.push_back(ch.t_of(k.at));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const RealFn f = [&tab](double u) { return tab->integrand(u); };
  struct Panel {
    double a, b, m;
  };
  std::vector<Panel> done;
  struct Pending {
    double a, b;
    int depth;
  };
  std::vector<Pending> stack;
  for (std::size_t i = edges.size() - 1; i > 0; --i) stack.push_back({edges[i - 1], edges[i], 0});
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const PanelResult r = kronrod21(f, p.a, p.b);
    const double mid = 0.5 * (p.a + p.b);
    const bool small_enough = r.error <= 1e-12 * std::abs(r.value) + 1e-18;
    if (small_enough || p.depth >= 48 || !(mid > p.a && mid < p.b) || done.size() > 200000) {
      done.push_back({p.a, p.b, r.value});
    } else {
      stack.push_back({mid, p.b, p.depth + 1});
      stack.push_back({p.a, mid, p.depth + 1});
    }
  }

  double total = 0.0;
  for (const auto& p : done) total += p.m;
  tab->total = total;
  if (!(std::abs(total - 1.0) <= 1e-7)) {
    std::ostringstream os;
    os.precision(12);
    os << d.name << " has mass " << total << ", expected 1";
    throw Error(ErrorCode::NormalizationFailure, os.str());
  }
  const std::size_t m = done.size();
  tab->t.resize(m + 1);
  tab->mass.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    tab->t[i] = done[i].a;
    tab->mass[i] = done[i].m / total;
  }
  tab->t[m] = done.back().b;
  tab->left.assign(m + 1, 0.0);
  tab->right.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) tab->left[i + 1] = tab->left[i] + tab->mass[i];
  for (std::size_t i = m; i > 0; --i) tab->right[i - 1] = tab->right[i] + tab->mass[i - 1];

  table_ = tab;
  tab->median = quantile(0.5);
  const double ladder[] = {1e-9, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-4, 1 - 1e-6, 1 - 1e-9};
  std::vector<double> br;
  for (double u : ladder) br.push_back(quantile(u));
  for (const auto& k : d.kinks) br.push_back(k.at);
  std::sort(br.begin(), br.end());
  br.erase(std::remove_if(br.begin(), br.end(),
                          [&](double x) { return !std::isfinite(x) || !(x > d.support.lo && x < d.support.hi); }),
           br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  tab->breaks = std::move(br);
}

const Density1D& Measure1D::density() const { return table_->density; }

double Measure1D::pdf(double x) const { return table_->density.pdf(x); }

double Measure1D::raw_mass() const { return table_->total; }

double Measure1D::median() const { return table_->median; }

const std::vector<double>& Measure1D::breakpoints() const { return table_->breaks; }

double Measure1D::cdf(double x) const {
  const auto& tab = *table_;
  if (std::isnan(x)) throw Error(ErrorCode::BadParameter, "cdf at NaN");
  if (x <= tab.density.support.lo) return 0.0;
  if (x >= tab.density.support.hi) return 1.0;
  return tab.both_sides(tab.chart.t_of(x)).first;
}

double Measure1D::sf(double x) const {
  const auto& tab = *table_;
  if (std::isnan(x)) throw Error(ErrorCode::BadParameter, "sf at NaN");
  if (x <= tab.density.support.lo) return 1.0;
  if (x >= tab.density.support.hi) return 0.0;
  return tab.both_sides(tab.chart.t_of(x)).second;
}

double Measure1D::quantile(double u) const {
  const auto& tab = *table_;
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::QuantileInversion, "quantile level outside [0,1]");
  }
  if (u == 0.0) return tab.density.support.lo;
  if (u == 1.0) return tab.density.support.hi;
  const std::size_t m = tab.mass.size();
  const bool from_left = u <= 0.5;
  const double v = from_left ? u : 1.0 - u;
  std::size_t k = 0;
  if (from_left) {
    auto it = std::upper_bound(tab.left.begin(), tab.left.end(), v);
    k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - tab.left.begin() - 1));
  } else {
    // right is non-increasing; first k with right[k + 1] <= v.
    std::size_t lo = 0;
    std::size_t hi = m - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (tab.right[mid + 1] <= v) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    k = lo;
  }
  k = std::min(k, m - 1);
  const double a0 = tab.t[k];
  const double b0 = tab.t[k + 1];
  double a = a0;
  double b = b0;
  // g increasing in t on [a0, b0].
  auto g = [&](double tt) {
    return from_left ? tab.left[k] + tab.gl(a0, tt) - v : v - (tab.right[k + 1] + tab.gl(tt, b0));
  };
  double tt = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double gv = g(tt);
    if (gv == 0.0) break;
    if (gv < 0.0) {
      a = tt;
    } else {
      b = tt;
    }
    const double slope = tab.integrand(tt) / tab.total;
    double next = slope > 0.0 ? tt - gv / slope : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - tt) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tt)) ||
        b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tt))) {
      tt = next;
      break;
    }
    tt = next;
  }
  if (!(tt >= a0 && tt <= b0) || std::isnan(tt)) {
    throw Error(ErrorCode::QuantileInversion, tab.density.name + ": root search left its bracket");
  }
  return tab.chart.x_of(tt);
}

double Measure1D::kernel(double x, double y) const {
  const double a = std::min(x, y);
  const double b = std::max(x, y);
  return cdf(a) * sf(b);
}

std::vector<double> Measure1D::splits_with(std::span<const double> extra) const {
  const auto& s = table_->density.support;
  std::vector<double> out = table_->breaks;
  for (double x : extra) {
    if (std::isfinite(x) && x > s.lo && x < s.hi) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Measure1D::kernel_integral(double x, const RealFn& g, std::span<const double> g_kinks) const {
  const auto& s = table_->density.support;
  if (!(x > s.lo && x < s.hi)) return 0.0;
  std::vector<double> extra(g_kinks.begin(), g_kinks.end());
  extra.push_back(x);
  const auto splits = splits_with(extra);
  const double Fx = cdf(x);
  const double Sx = sf(x);
  double below = 0.0;
  double above = 0.0;
  if (Sx > 0.0) {
    below = integrate_value(
        [&](double y) {
          const double F = cdf(y);
          return F == 0.0 ? 0.0 : F * g(y);
        },
        Interval{s.lo, x}, QuadConfig{1e-10, 1e-13 * Fx + 1e-300, 2000}, splits, "kernel integral (y < x)");
  }
  if (Fx > 0.0) {
    above = integrate_value(
        [&](double y) {
          const double S = sf(y);
          return S == 0.0 ? 0.0 : S * g(y);
        },
        Interval{x, s.hi}, QuadConfig{1e-10, 1e-13 * Sx + 1e-300, 2000}, splits, "kernel integral (y > x)");
  }
  return Sx * below + Fx * above;
}

double Measure1D::expectation(const RealFn& g, std::span<const double> g_kinks) const {
  const auto splits = splits_with(g_kinks);
  return integrate_value(
      [&](double y) {
        const double p = pdf(y);
        return p == 0.0 ? 0.0 : p * g(y);
      },
      table_->density.support, QuadConfig{1e-11, 1e-14, 2000}, splits, "expectation") / table_->total;
}

}  // namespace efron
