#include "efron/density.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "efron/error.hpp"
#include "efron/parse.hpp"

namespace efron {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::BadParameter, msg);
}

std::string with_args(const std::string& name, std::initializer_list<double> args) {
  std::string out = name + "(";
  bool first = true;
  for (double a : args) {
    if (!first) out += ",";
    out += format_number(a);
    first = false;
  }
  return out + ")";
}

}  // namespace

double Density1D::pdf(double x) const {
  if (!(x > support.lo && x < support.hi)) return 0.0;
  return std::exp(-phi(x));
}

std::vector<double> Density1D::kink_points() const {
  std::vector<double> pts;
  pts.reserve(kinks.size());
  for (const auto& k : kinks) pts.push_back(k.at);
  return pts;
}

void validate(const Density1D& d) {
  if (!d.phi || !d.dphi || !d.d2phi) throw Error(ErrorCode::BadParameter, d.name + ": missing potential derivatives");
  const auto kinks = d.kink_points();
  const double mass = integrate_value([&](double x) { return d.pdf(x); }, d.support,
                                      QuadConfig{1e-11, 1e-14, 4000}, kinks, "density mass");
  if (std::abs(mass - 1.0) > 1e-7) {
    std::ostringstream os;
    os << d.name << " integrates to " << mass;
    throw Error(ErrorCode::NormalizationFailure, os.str());
  }
  if (!d.log_concave_hint) return;
  // Dense probe through the bulk: t in (-1,1) mapped onto the support.
  for (int i = 1; i < 400; ++i) {
    const double t = -1.0 + 2.0 * i / 400.0;
    double x = 0.0;
    if (d.support.lower_finite() && d.support.upper_finite()) {
      x = d.support.lo + 0.5 * (t + 1.0) * (d.support.hi - d.support.lo);
    } else if (d.support.lower_finite()) {
      const double u = 0.5 * (t + 1.0);
      x = d.support.lo + 10.0 * u / (1.0 - u);
    } else if (d.support.upper_finite()) {
      const double u = 0.5 * (1.0 - t);
      x = d.support.hi - 10.0 * u / (1.0 - u);
    } else {
      x = 10.0 * t / (1.0 - t * t);
    }
    const double v = d.d2phi(x);
    if (v < -1e-9) {
      std::ostringstream os;
      os << d.name << " is flagged log-concave but phi''(" << x << ") = " << v;
      throw Error(ErrorCode::BadParameter, os.str());
    }
  }
}

Density1D normal_density(double mean, double variance) {
  require(std::isfinite(mean) && variance > 0.0 && std::isfinite(variance), "normal needs finite mean and variance > 0");
  Density1D d;
  d.name = with_args("normal", {mean, variance});
  const double lognorm = 0.5 * std::log(2.0 * std::numbers::pi * variance);
  d.phi = [=](double x) { return 0.5 * (x - mean) * (x - mean) / variance + lognorm; };
  d.dphi = [=](double x) { return (x - mean) / variance; };
  d.d2phi = [=](double) { return 1.0 / variance; };
  d.log_concave_hint = true;
  return d;
}

Density1D gamma_density(double theta) {
  require(theta > 0.0 && std::isfinite(theta), "gamma needs theta > 0");
  Density1D d;
  d.name = with_args("gamma", {theta});
  d.support = Interval{0.0, std::numeric_limits<double>::infinity()};
  const double lg = std::lgamma(theta);
  d.phi = [=](double x) { return x - (theta - 1.0) * std::log(x) + lg; };
  d.dphi = [=](double x) { return 1.0 - (theta - 1.0) / x; };
  d.d2phi = [=](double x) { return (theta - 1.0) / (x * x); };
  d.log_concave_hint = theta >= 1.0;
  return d;
}

Density1D exponential_density() {
  Density1D d = gamma_density(1.0);
  d.name = "exponential";
  d.phi = [](double x) { return x; };
  d.dphi = [](double) { return 1.0; };
  d.d2phi = [](double) { return 0.0; };
  return d;
}

Density1D logistic_density() {
  Density1D d;
  d.name = "logistic";
  d.phi = [](double x) { return std::abs(x) + 2.0 * std::log1p(std::exp(-std::abs(x))); };
  d.dphi = [](double x) { return std::tanh(0.5 * x); };
  d.d2phi = [](double x) {
    const double c = std::cosh(0.5 * x);
    return 0.5 / (c * c);
  };
  d.log_concave_hint = true;
  return d;
}

Density1D laplace_density() {
  Density1D d;
  d.name = "laplace";
  d.phi = [](double x) { return std::abs(x) + std::numbers::ln2; };
  d.dphi = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
  d.d2phi = [](double) { return 0.0; };
  d.kinks = {PotentialJump{0.0, 2.0}};
  d.log_concave_hint = true;
  return d;
}

Density1D cauchy_density() {
  Density1D d;
  d.name = "cauchy";
  const double logpi = std::log(std::numbers::pi);
  d.phi = [=](double x) { return logpi + std::log1p(x * x); };
  d.dphi = [](double x) { return 2.0 * x / (1.0 + x * x); };
  d.d2phi = [](double x) {
    const double q = 1.0 + x * x;
    return 2.0 * (1.0 - x * x) / (q * q);
  };
  return d;
}

Density1D bridge_density(double theta) {
  require(theta > 0.0 && theta < 1.0, "bridge needs 0 < theta < 1");
  Density1D d;
  d.name = with_args("bridge", {theta});
  const double c = std::cos(std::numbers::pi * theta);
  const double lognorm = std::log(2.0 * std::numbers::pi) - std::log(std::sin(std::numbers::pi * theta));
  // Everything is written through e = exp(-theta|x|) so the tails never overflow.
  d.phi = [=](double x) {
    const double a = theta * std::abs(x);
    const double e = std::exp(-a);
    return lognorm + a + std::log(0.5 * (1.0 + e * e) + c * e);
  };
  d.dphi = [=](double x) {
    const double a = theta * std::abs(x);
    const double e = std::exp(-a);
    const double v = theta * (1.0 - e * e) / (1.0 + e * e + 2.0 * c * e);
    return x < 0.0 ? -v : v;
  };
  d.d2phi = [=](double x) {
    const double e = std::exp(-theta * std::abs(x));
    const double den = 1.0 + e * e + 2.0 * c * e;
    return theta * theta * 2.0 * e * (2.0 * e + c * (1.0 + e * e)) / (den * den);
  };
  d.log_concave_hint = theta <= 0.5;
  return d;
}

Density1D uniform_density(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "uniform needs finite a < b");
  Density1D d;
  d.name = with_args("uniform", {a, b});
  d.support = Interval{a, b};
  const double lw = std::log(b - a);
  d.phi = [=](double) { return lw; };
  d.dphi = [](double) { return 0.0; };
  d.d2phi = [](double) { return 0.0; };
  d.log_concave_hint = true;
  return d;
}

Density1D parse_density(std::string_view spec) {
  const Call call = parse_call(spec);
  const auto& n = call.name;
  const auto nargs = call.args.size();
  auto arg = [&](std::size_t i) { return parse_number(call.args[i], n + " argument"); };
  auto expect = [&](std::size_t k) {
    if (nargs != k) {
      std::ostringstream os;
      os << n << " takes " << k << " argument(s), got " << nargs;
      throw Error(ErrorCode::BadParameter, os.str());
    }
  };
  if (n == "normal") {
    if (nargs == 0) return normal_density(0.0, 1.0);
    expect(2);
    return normal_density(arg(0), arg(1));
  }
  if (n == "gamma") {
    expect(1);
    return gamma_density(arg(0));
  }
  if (n == "bridge") {
    expect(1);
    return bridge_density(arg(0));
  }
  if (n == "uniform") {
    if (nargs == 0) return uniform_density(0.0, 1.0);
    expect(2);
    return uniform_density(arg(0), arg(1));
  }
  if (n == "logistic") {
    expect(0);
    return logistic_density();
  }
  if (n == "laplace") {
    expect(0);
    return laplace_density();
  }
  if (n == "cauchy") {
    expect(0);
    return cauchy_density();
  }
  if (n == "exponential") {
    expect(0);
    return exponential_density();
  }
  throw Error(ErrorCode::BadParameter, "unknown density '" + n + "'");
}

}  // namespace efron
