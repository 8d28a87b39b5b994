#include "efron/joint_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "efron/error.hpp"
#include "efron/measure.hpp"
#include "efron/parse.hpp"

namespace efron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::BadParameter, msg);
}

std::string canonical(const std::string& family, const std::vector<std::pair<std::string, double>>& params) {
  std::string out = family + ":";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ",";
    out += params[i].first + "=" + format_number(params[i].second);
  }
  return out;
}

JointModel2D unit_square(const std::string& family, double theta) {
  JointModel2D m;
  m.family = family;
  m.params = {{"theta", theta}};
  m.spec = canonical(family, m.params);
  m.support_x = Interval{0.0, 1.0};
  m.support_y = Interval{0.0, 1.0};
  m.hints_x = {0.1, 0.5, 0.9};
  m.hints_y = {0.1, 0.5, 0.9};
  m.probe_x = Interval{0.1, 0.9};
  m.probe_y = Interval{0.1, 0.9};
  return m;
}

void set_zero_potential(JointModel2D& m) {
  m.phi = [](double, double) { return 0.0; };
  m.d1 = m.phi;
  m.d2 = m.phi;
  m.d11 = m.phi;
  m.d12 = m.phi;
  m.d22 = m.phi;
}

// Mixed partial from the tensor product of two fourth-order first-derivative stencils.
double fd_cross(const RealFn2& f, double x, double y, double h) {
  static constexpr double c[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    if (c[i] == 0.0) continue;
    for (int j = 0; j < 5; ++j) {
      if (c[j] == 0.0) continue;
      sum += c[i] * c[j] * f(x + (i - 2) * h, y + (j - 2) * h);
    }
  }
  return sum / (h * h);
}

double nudge_off_kinks(double v, const std::vector<PotentialJump>& kinks, double reach) {
  for (const auto& k : kinks) {
    if (std::abs(v - k.at) < reach) v = k.at + (v >= k.at ? reach : -reach);
  }
  return v;
}

}  // namespace

double JointModel2D::h(double x, double y) const {
  if (!in_support(x, y)) return 0.0;
  return std::exp(-phi(x, y));
}

bool JointModel2D::in_support(double x, double y) const {
  return x > support_x.lo && x < support_x.hi && y > support_y.lo && y < support_y.hi;
}

double JointModel2D::param(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  throw Error(ErrorCode::BadParameter, spec + " has no parameter '" + std::string(key) + "'");
}

JointModel2D gaussian_model(double sigma, double tau, double rho) {
  require(sigma > 0.0 && tau > 0.0 && std::isfinite(sigma) && std::isfinite(tau), "gaussian needs sigma, tau > 0");
  require(std::abs(rho) < 1.0, "gaussian needs |rho| < 1");
  JointModel2D m;
  m.family = "gaussian";
  m.params = {{"sigma", sigma}, {"tau", tau}, {"rho", rho}};
  m.spec = canonical(m.family, m.params);
  m.support_x = Interval{-kInf, kInf};
  m.support_y = Interval{-kInf, kInf};
  const double q = 1.0 / (1.0 - rho * rho);
  const double st = sigma * tau;
  const double lognorm = std::log(2.0 * std::numbers::pi * st * std::sqrt(1.0 - rho * rho));
  m.phi = [=](double x, double y) {
    return 0.5 * q * (x * x / (sigma * sigma) - 2.0 * rho * x * y / st + y * y / (tau * tau)) + lognorm;
  };
  m.d1 = [=](double x, double y) { return q * (x / (sigma * sigma) - rho * y / st); };
  m.d2 = [=](double x, double y) { return q * (y / (tau * tau) - rho * x / st); };
  m.d11 = [=](double, double) { return q / (sigma * sigma); };
  m.d12 = [=](double, double) { return -q * rho / st; };
  m.d22 = [=](double, double) { return q / (tau * tau); };
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    m.hints_x.push_back(k * sigma);
    m.hints_y.push_back(k * tau);
  }
  m.probe_x = Interval{-2.0 * sigma, 2.0 * sigma};
  m.probe_y = Interval{-2.0 * tau, 2.0 * tau};
  return m;
}

JointModel2D morgenstern_model(double theta) {
  require(std::abs(theta) <= 1.0, "morgenstern needs |theta| <= 1");
  JointModel2D m = unit_square("morgenstern", theta);
  // c = 1 + theta (1-2x)(1-2y)
  m.phi = [=](double x, double y) { return -std::log1p(theta * (1.0 - 2.0 * x) * (1.0 - 2.0 * y)); };
  m.d1 = [=](double x, double y) {
    const double u = 1.0 - 2.0 * x, v = 1.0 - 2.0 * y;
    return 2.0 * theta * v / (1.0 + theta * u * v);
  };
  m.d2 = [=](double x, double y) {
    const double u = 1.0 - 2.0 * x, v = 1.0 - 2.0 * y;
    return 2.0 * theta * u / (1.0 + theta * u * v);
  };
  m.d11 = [=](double x, double y) {
    const double u = 1.0 - 2.0 * x, v = 1.0 - 2.0 * y;
    const double c = 1.0 + theta * u * v;
    return 4.0 * theta * theta * v * v / (c * c);
  };
  m.d12 = [=](double x, double y) {
    const double u = 1.0 - 2.0 * x, v = 1.0 - 2.0 * y;
    const double c = 1.0 + theta * u * v;
    return -4.0 * theta / c + 4.0 * theta * theta * u * v / (c * c);
  };
  m.d22 = [=](double x, double y) {
    const double u = 1.0 - 2.0 * x, v = 1.0 - 2.0 * y;
    const double c = 1.0 + theta * u * v;
    return 4.0 * theta * theta * u * u / (c * c);
  };
  return m;
}

JointModel2D frank_model(double theta) {
  require(theta > 0.0 && std::isfinite(theta), "frank needs theta > 0");
  JointModel2D m = unit_square("frank", theta);
  if (theta == 1.0) {
    set_zero_potential(m);
    return m;
  }
  // Density -L (1-theta) theta^(x+y) / M^2 with M = theta - a - b + ab,
  // a = theta^x, b = theta^y, L = log theta.
  const double L = std::log(theta);
  const double lognorm = -std::log(-L * (1.0 - theta));
  struct Parts {
    double M, Mx, My, a, b;
  };
  auto parts = [=](double x, double y) {
    const double a = std::exp(L * x), b = std::exp(L * y);
    return Parts{theta - a - b + a * b, -L * a * (1.0 - b), -L * b * (1.0 - a), a, b};
  };
  m.phi = [=](double x, double y) {
    const Parts p = parts(x, y);
    return lognorm - L * (x + y) + 2.0 * std::log(std::abs(p.M));
  };
  m.d1 = [=](double x, double y) {
    const Parts p = parts(x, y);
    return -L + 2.0 * p.Mx / p.M;
  };
  m.d2 = [=](double x, double y) {
    const Parts p = parts(x, y);
    return -L + 2.0 * p.My / p.M;
  };
  m.d11 = [=](double x, double y) {
    const Parts p = parts(x, y);
    const double Mxx = -L * L * p.a * (1.0 - p.b);
    return 2.0 * (Mxx * p.M - p.Mx * p.Mx) / (p.M * p.M);
  };
  m.d12 = [=](double x, double y) {
    const Parts p = parts(x, y);
    const double Mxy = L * L * p.a * p.b;
    return 2.0 * (Mxy * p.M - p.Mx * p.My) / (p.M * p.M);
  };
  m.d22 = [=](double x, double y) {
    const Parts p = parts(x, y);
    const double Myy = -L * L * p.b * (1.0 - p.a);
    return 2.0 * (Myy * p.M - p.My * p.My) / (p.M * p.M);
  };
  return m;
}

JointModel2D clayton_oakes_model(double theta) {
  require(theta > 0.0 && std::isfinite(theta), "clayton_oakes needs theta > 0");
  JointModel2D m = unit_square("clayton_oakes", theta);
  // Density (1+theta) (xy)^(-theta-1) W^(-2-1/theta), W = x^-theta + y^-theta - 1.
  const double k = 2.0 + 1.0 / theta;
  const double lognorm = -std::log1p(theta);
  auto W = [=](double x, double y) { return std::pow(x, -theta) + std::pow(y, -theta) - 1.0; };
  m.phi = [=](double x, double y) {
    return lognorm + (theta + 1.0) * (std::log(x) + std::log(y)) + k * std::log(W(x, y));
  };
  m.d1 = [=](double x, double y) {
    const double Wx = -theta * std::pow(x, -theta - 1.0);
    return (theta + 1.0) / x + k * Wx / W(x, y);
  };
  m.d2 = [=](double x, double y) {
    const double Wy = -theta * std::pow(y, -theta - 1.0);
    return (theta + 1.0) / y + k * Wy / W(x, y);
  };
  m.d11 = [=](double x, double y) {
    const double w = W(x, y);
    const double Wx = -theta * std::pow(x, -theta - 1.0);
    const double Wxx = theta * (theta + 1.0) * std::pow(x, -theta - 2.0);
    return -(theta + 1.0) / (x * x) + k * (Wxx * w - Wx * Wx) / (w * w);
  };
  m.d12 = [=](double x, double y) {
    const double w = W(x, y);
    const double Wx = -theta * std::pow(x, -theta - 1.0);
    const double Wy = -theta * std::pow(y, -theta - 1.0);
    return -k * Wx * Wy / (w * w);
  };
  m.d22 = [=](double x, double y) {
    const double w = W(x, y);
    const double Wy = -theta * std::pow(y, -theta - 1.0);
    const double Wyy = theta * (theta + 1.0) * std::pow(y, -theta - 2.0);
    return -(theta + 1.0) / (y * y) + k * (Wyy * w - Wy * Wy) / (w * w);
  };
  return m;
}

JointModel2D independent_model(const Density1D& gx, const Density1D& gy) {
  JointModel2D m;
  m.family = "independent";
  m.spec = "independent:x=" + gx.name + ",y=" + gy.name;
  m.support_x = gx.support;
  m.support_y = gy.support;
  const RealFn px = gx.phi, py = gy.phi, dx = gx.dphi, dy = gy.dphi, ddx = gx.d2phi, ddy = gy.d2phi;
  m.phi = [=](double x, double y) { return px(x) + py(y); };
  m.d1 = [=](double x, double) { return dx(x); };
  m.d2 = [=](double, double y) { return dy(y); };
  m.d11 = [=](double x, double) { return ddx(x); };
  m.d12 = [](double, double) { return 0.0; };
  m.d22 = [=](double, double y) { return ddy(y); };
  m.kinks_x = gx.kinks;
  m.kinks_y = gy.kinks;
  m.marginal_x = gx;
  m.marginal_y = gy;
  const Measure1D mx(gx);
  const Measure1D my(gy);
  m.hints_x = mx.breakpoints();
  m.hints_y = my.breakpoints();
  m.probe_x = Interval{mx.quantile(0.05), mx.quantile(0.95)};
  m.probe_y = Interval{my.quantile(0.05), my.quantile(0.95)};
  return m;
}

double model_mass(const JointModel2D& model) {
  std::vector<double> sx = model.hints_x;
  std::vector<double> sy = model.hints_y;
  for (const auto& k : model.kinks_x) sx.push_back(k.at);
  for (const auto& k : model.kinks_y) sy.push_back(k.at);
  return integrate_value(
      [&](double x) {
        return integrate_value([&](double y) { return model.h(x, y); }, model.support_y,
                               QuadConfig{1e-11, 1e-15, 2000}, sy, "model mass (inner)");
      },
      model.support_x, QuadConfig{1e-10, 1e-13, 2000}, sx, "model mass");
}

double model_covariance(const JointModel2D& model) {
  std::vector<double> sx = model.hints_x;
  std::vector<double> sy = model.hints_y;
  const QuadConfig inner{1e-11, 1e-15, 2000};
  const QuadConfig outer{1e-10, 1e-14, 2000};
  auto moment = [&](const RealFn2& g) {
    return integrate_value(
        [&](double x) {
          return integrate_value([&](double y) { return g(x, y) * model.h(x, y); }, model.support_y, inner, sy,
                                 "model moment (inner)");
        },
        model.support_x, outer, sx, "model moment");
  };
  const double mass = moment([](double, double) { return 1.0; });
  const double ex = moment([](double x, double) { return x; }) / mass;
  const double ey = moment([](double, double y) { return y; }) / mass;
  return moment([&](double x, double y) { return (x - ex) * (y - ey); }) / mass;
}

double hessian_check(const JointModel2D& model, int n_points) {
  require(n_points >= 2, "hessian_check needs n_points >= 2");
  double worst = 0.0;
  auto dev = [](double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
  };
  for (int i = 0; i < n_points; ++i) {
    for (int j = 0; j < n_points; ++j) {
      double x = model.probe_x.lo + (model.probe_x.hi - model.probe_x.lo) * i / (n_points - 1);
      double y = model.probe_y.lo + (model.probe_y.hi - model.probe_y.lo) * j / (n_points - 1);
      const double hx2 = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0) * std::max(1.0, std::abs(x));
      const double hy2 = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0) * std::max(1.0, std::abs(y));
      x = nudge_off_kinks(x, model.kinks_x, 2.5 * hx2);
      y = nudge_off_kinks(y, model.kinks_y, 2.5 * hy2);
      const RealFn along_x = [&](double t) { return model.phi(t, y); };
      const RealFn along_y = [&](double t) { return model.phi(x, t); };
      const double hc = 1e-3 * std::max({1.0, std::abs(x), std::abs(y)});
      worst = std::max(worst, dev(model.d1(x, y), finite_diff(along_x, x, 1)));
      worst = std::max(worst, dev(model.d2(x, y), finite_diff(along_y, y, 1)));
      worst = std::max(worst, dev(model.d11(x, y), finite_diff(along_x, x, 2)));
      worst = std::max(worst, dev(model.d22(x, y), finite_diff(along_y, y, 2)));
      worst = std::max(worst, dev(model.d12(x, y), fd_cross(model.phi, x, y, hc)));
    }
  }
  return worst;
}

JointModel2D make_model(std::string_view family_in, const std::map<std::string, std::string>& params) {
  std::string family(family_in);
  if (family == "clayton" || family == "clayton-oakes") family = "clayton_oakes";
  auto number = [&](const std::string& key, std::optional<double> fallback) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (fallback) return *fallback;
      throw Error(ErrorCode::BadParameter, family + " needs parameter '" + key + "'");
    }
    return parse_number(it->second, family + " " + key);
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* key : keys) ok = ok || k == key;
      if (!ok) throw Error(ErrorCode::BadParameter, family + " has no parameter '" + k + "'");
    }
  };
  JointModel2D m;
  if (family == "gaussian") {
    only({"sigma", "tau", "rho"});
    m = gaussian_model(number("sigma", 1.0), number("tau", 1.0), number("rho", 0.0));
  } else if (family == "morgenstern") {
    only({"theta"});
    m = morgenstern_model(number("theta", std::nullopt));
  } else if (family == "frank") {
    only({"theta"});
    m = frank_model(number("theta", std::nullopt));
  } else if (family == "clayton_oakes") {
    only({"theta"});
    m = clayton_oakes_model(number("theta", std::nullopt));
  } else if (family == "independent") {
    only({"x", "y"});
    auto get = [&](const char* key) {
      auto it = params.find(key);
      if (it == params.end()) throw Error(ErrorCode::BadParameter, std::string("independent needs '") + key + "'");
      return parse_density(it->second);
    };
    m = independent_model(get("x"), get("y"));
  } else {
    throw Error(ErrorCode::BadParameter, "unknown model family '" + family + "'");
  }

  const double mass = model_mass(m);
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os.precision(12);
    os << m.spec << " has mass " << mass;
    throw Error(ErrorCode::NormalizationFailure, os.str());
  }
  const double worst = hessian_check(m, 9);
  if (worst > 1e-4) {
    std::ostringstream os;
    os << m.spec << ": analytic partials differ from finite differences by " << worst;
    throw Error(ErrorCode::InconsistentDerivatives, os.str());
  }
  return m;
}

JointModel2D parse_model(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string family(trim(spec.substr(0, colon)));
  std::map<std::string, std::string> params;
  if (colon != std::string_view::npos) {
    const std::string_view rest = trim(spec.substr(colon + 1));
    if (!rest.empty()) {
      for (const auto& item : split_top_level(rest, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::BadParameter, "expected key=value, got '" + item + "'");
        const std::string key(trim(std::string_view(item).substr(0, eq)));
        if (!params.emplace(key, std::string(trim(std::string_view(item).substr(eq + 1)))).second) {
          throw Error(ErrorCode::BadParameter, "parameter '" + key + "' given twice");
        }
      }
    }
  }
  return make_model(family, params);
}

}  // namespace efron
