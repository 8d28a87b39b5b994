#include "efron/psi.hpp"

#include <algorithm>
#include <cmath>

#include "efron/error.hpp"
#include "efron/parse.hpp"

namespace efron {

namespace {

// Lifts a one-coordinate function and its derivative onto the plane.
PsiFunction one_axis(std::string name, Axis axis, RealFn f, RealFn df, bool monotone) {
  PsiFunction p;
  p.name = std::move(name);
  p.single_axis = axis;
  p.single = f;
  if (axis == Axis::X) {
    p.value = [f](double x, double) { return f(x); };
    p.d1 = [df](double x, double) { return df(x); };
    p.d2 = [](double, double) { return 0.0; };
    p.monotone_x = monotone;
    p.monotone_y = true;
  } else {
    p.value = [f](double, double y) { return f(y); };
    p.d1 = [](double, double) { return 0.0; };
    p.d2 = [df](double, double y) { return df(y); };
    p.monotone_x = true;
    p.monotone_y = monotone;
  }
  return p;
}

Axis parse_axis(std::string_view s) {
  s = trim(s);
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  throw Error(ErrorCode::BadParameter, "expected x or y, got '" + std::string(s) + "'");
}

const char* axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

}  // namespace

PsiFunction constant_psi(double c) {
  PsiFunction p = one_axis("const(" + format_number(c) + ")", Axis::X, [c](double) { return c; },
                           [](double) { return 0.0; }, true);
  return p;
}

PsiFunction linear_psi(double a, double b) {
  const std::string name = "linear(" + format_number(a) + "," + format_number(b) + ")";
  if (b == 0.0) {
    return one_axis(name, Axis::X, [a](double x) { return a * x; }, [a](double) { return a; }, a >= 0.0);
  }
  if (a == 0.0) {
    return one_axis(name, Axis::Y, [b](double y) { return b * y; }, [b](double) { return b; }, b >= 0.0);
  }
  PsiFunction p;
  p.name = name;
  p.value = [a, b](double x, double y) { return a * x + b * y; };
  p.d1 = [a](double, double) { return a; };
  p.d2 = [b](double, double) { return b; };
  p.monotone_x = a >= 0.0;
  p.monotone_y = b >= 0.0;
  return p;
}

PsiFunction indicator_psi(Axis axis, double c) {
  PsiFunction p = one_axis(std::string("indicator(") + axis_name(axis) + ">" + format_number(c) + ")", axis,
                           [c](double t) { return t > c ? 1.0 : 0.0; }, [](double) { return 0.0; }, true);
  p.differentiable = false;
  (axis == Axis::X ? p.kinks_x : p.kinks_y).push_back(c);
  return p;
}

PsiFunction tanh_psi(Axis axis) {
  return one_axis(std::string("tanh(") + axis_name(axis) + ")", axis, [](double t) { return std::tanh(t); },
                  [](double t) {
                    const double c = std::cosh(t);
                    return 1.0 / (c * c);
                  },
                  true);
}

PsiFunction ramp_psi(Axis axis, double c, double width) {
  if (!(width > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::BadParameter, "ramp needs width > 0");
  const double a = c - 0.5 * width;
  std::string name = "ramp(";
  if (axis == Axis::Y) name += "y,";
  name += format_number(c) + "," + format_number(width) + ")";
  PsiFunction p = one_axis(
      name, axis,
      [a, width](double t) {
        const double u = std::clamp((t - a) / width, 0.0, 1.0);
        return u * u * (3.0 - 2.0 * u);
      },
      [a, width](double t) {
        const double u = (t - a) / width;
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return 6.0 * u * (1.0 - u) / width;
      },
      true);
  auto& k = axis == Axis::X ? p.kinks_x : p.kinks_y;
  k = {a, a + width};
  return p;
}

PsiFunction parse_psi(std::string_view spec) {
  const Call call = parse_call(spec);
  const auto& n = call.name;
  const auto nargs = call.args.size();
  auto num = [&](std::size_t i) { return parse_number(call.args[i], n + " argument"); };
  auto expect = [&](std::size_t k) {
    if (nargs != k) throw Error(ErrorCode::BadParameter, "psi " + n + " takes " + std::to_string(k) + " argument(s)");
  };
  if (n == "x" || n == "y") {
    expect(0);
    return n == "x" ? linear_psi(1.0, 0.0) : linear_psi(0.0, 1.0);
  }
  if (n == "const") {
    expect(1);
    return constant_psi(num(0));
  }
  if (n == "linear") {
    expect(2);
    return linear_psi(num(0), num(1));
  }
  if (n == "tanh") {
    expect(1);
    return tanh_psi(parse_axis(call.args[0]));
  }
  if (n == "indicator") {
    expect(1);
    const std::string& a = call.args[0];
    const auto gt = a.find('>');
    if (gt == std::string::npos) throw Error(ErrorCode::BadParameter, "indicator expects x>c or y>c");
    return indicator_psi(parse_axis(std::string_view(a).substr(0, gt)),
                         parse_number(std::string_view(a).substr(gt + 1), "indicator threshold"));
  }
  if (n == "ramp") {
    if (nargs == 2) return ramp_psi(Axis::X, num(0), num(1));
    expect(3);
    return ramp_psi(parse_axis(call.args[0]), num(1), num(2));
  }
  throw Error(ErrorCode::BadParameter, "unknown psi '" + n + "'");
}

double min_declared_slope(const PsiFunction& psi, Interval bx, Interval by, int n) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = bx.lo + (bx.hi - bx.lo) * i / (n - 1);
      const double y = by.lo + (by.hi - by.lo) * j / (n - 1);
      if (psi.monotone_x) worst = std::min(worst, psi.d1(x, y));
      if (psi.monotone_y) worst = std::min(worst, psi.d2(x, y));
    }
  }
  return worst;
}

}  // namespace efron
