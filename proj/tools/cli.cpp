#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "efron/bivariate.hpp"
#include "efron/efron.hpp"
#include "efron/error.hpp"
#include "efron/identities.hpp"
#include "efron/oracle.hpp"
#include "efron/parse.hpp"

namespace efron::cli {

namespace {

constexpr double kIdentityRtol = 1e-5;
constexpr double kMonotoneSlack = -1e-8;

struct Row {
  std::vector<Cell> cells;
  bool pass = true;
  double err = 0.0;
  std::vector<std::string> warnings;
};

int worker_count(const RunConfig& cfg, std::size_t n) {
  int t = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(n, 1)));
}

// Row i is computed by worker i % T into slot i; the lowest failing index
// decides which exception escapes, so output never depends on scheduling.
std::vector<Row> parallel_rows(const RunConfig& cfg, std::size_t n, const std::function<Row(std::size_t)>& fn) {
  std::vector<Row> rows(n);
  std::vector<std::exception_ptr> errors(n);
  const int workers = worker_count(cfg, n);
  auto body = [&](int k) {
    for (std::size_t i = static_cast<std::size_t>(k); i < n; i += static_cast<std::size_t>(workers)) {
      try {
        rows[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(body, k);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void collect(Report& rep, std::vector<Row> rows) {
  for (auto& r : rows) {
    rep.rows.push_back(std::move(r.cells));
    (r.pass ? rep.pass : rep.fail) += 1;
    if (std::isfinite(r.err)) rep.max_abs_err = std::max(rep.max_abs_err, r.err);
    for (auto& w : r.warnings) {
      if (std::find(rep.warnings.begin(), rep.warnings.end(), w) == rep.warnings.end()) rep.warnings.push_back(w);
    }
  }
}

std::vector<double> quantile_grid(const Measure1D& m, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(m.quantile(0.005 + 0.99 * i / (n - 1)));
  return out;
}

const std::string& require(const std::string& v, const char* flag, const char* cmd) {
  if (v.empty()) throw Error(ErrorCode::BadParameter, std::string(cmd) + " needs " + flag);
  return v;
}

bool identity_pass(double err, double rhs, double tol) { return err <= tol + kIdentityRtol * std::abs(rhs); }

// Moment of order k, or NaN when the tail integral does not settle.
double moment_or_nan(const Measure1D& m, int k) {
  const auto r = integrate(
      [&](double x) {
        const double p = m.pdf(x);
        return p == 0.0 ? 0.0 : p * std::pow(std::abs(x), k);
      },
      m.density().support, QuadConfig{1e-8, 1e-12, 2000}, m.breakpoints());
  if (!r.converged || !(r.value < 1e12)) return std::nan("");
  return r.value;
}

struct CovPair {
  std::string label;
  RealFn a, da, b, db;
};

double sigmoid(double x) { return 0.5 * (1.0 + std::tanh(0.5 * x)); }

std::vector<CovPair> cov_pairs(const Measure1D& m) {
  const RealFn tanh_f = [](double x) { return std::tanh(x); };
  const RealFn tanh_d = [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); };
  const RealFn atan_f = [](double x) { return std::atan(x); };
  const RealFn atan_d = [](double x) { return 1.0 / (1.0 + x * x); };
  const RealFn sig_f = [](double x) { return sigmoid(x - 1.0); };
  const RealFn sig_d = [](double x) { return sigmoid(x - 1.0) * (1.0 - sigmoid(x - 1.0)); };
  const RealFn bump_f = [](double x) { return std::exp(-x * x); };
  const RealFn bump_d = [](double x) { return -2.0 * x * std::exp(-x * x); };
  const RealFn id_f = [](double x) { return x; };
  const RealFn one = [](double) { return 1.0; };
  std::vector<CovPair> out{
      {"a=tanh,b=tanh", tanh_f, tanh_d, tanh_f, tanh_d},
      {"a=tanh,b=atan", tanh_f, tanh_d, atan_f, atan_d},
      {"a=atan,b=sigmoid(x-1)", atan_f, atan_d, sig_f, sig_d},
      {"a=exp(-x^2),b=tanh", bump_f, bump_d, tanh_f, tanh_d},
  };
  if (std::isfinite(moment_or_nan(m, 2))) {
    out.push_back({"a=x,b=x", id_f, one, id_f, one});
    out.push_back({"a=x,b=atan", id_f, one, atan_f, atan_d});
    const Density1D& d = m.density();
    if (d.kinks.empty() && density_recovery_violation(m).empty()) {
      out.push_back({"a=x,b=phi'", id_f, one, d.dphi, d.d2phi});
    }
  }
  return out;
}

Report identity_density_recovery(const RunConfig& cfg, const Measure1D& m, double tol) {
  const auto why = density_recovery_violation(m);
  if (!why.empty()) throw Error(ErrorCode::HypothesisViolation, why);
  const auto xs = cfg.s ? cfg.s->points() : quantile_grid(m, 41);
  Report rep;
  collect(rep, parallel_rows(cfg, xs.size(), [&](std::size_t i) {
            const double x = xs[i];
            const double lhs = density_recovery(m, x);
            const double rhs = m.pdf(x);
            const double err = std::abs(lhs - rhs);
            const bool ok = identity_pass(err, rhs, tol);
            return Row{{std::string("density-recovery"), m.density().name, x, lhs, rhs, err, ok}, ok, err, {}};
          }));
  return rep;
}

Report identity_indicator(const RunConfig& cfg, const Measure1D& m, double tol) {
  std::vector<double> zs;
  if (cfg.z) {
    zs = {*cfg.z};
  } else if (cfg.s) {
    zs = cfg.s->points();
  } else {
    zs = quantile_grid(m, 41);
  }
  const Density1D& d = m.density();
  struct Choice {
    std::string label;
    RealFn b, db;
    std::vector<PotentialJump> jumps;
  };
  std::vector<Choice> choices;
  Report rep;
  if (std::isfinite(moment_or_nan(m, 1))) {
    choices.push_back({"b=x", [](double x) { return x; }, [](double) { return 1.0; }, {}});
  } else {
    rep.warnings.push_back("b=x skipped: " + d.name + " has no first moment");
  }
  // b = phi': phi'' with its point masses; lhs reduces to f(z) when f vanishes at the ends.
  choices.push_back({"b=phi'", d.dphi, d.d2phi, d.kinks});

  std::vector<std::pair<std::size_t, double>> jobs;
  for (std::size_t c = 0; c < choices.size(); ++c) {
    for (double z : zs) jobs.emplace_back(c, z);
  }
  collect(rep, parallel_rows(cfg, jobs.size(), [&](std::size_t i) {
            const auto& ch = choices[jobs[i].first];
            const double z = jobs[i].second;
            const auto r = indicator_identity(m, z, ch.b, ch.db, ch.jumps, d.kink_points());
            const double err = std::abs(r.lhs - r.rhs);
            const bool ok = identity_pass(err, r.rhs, tol);
            Row row{{std::string("indicator"), ch.label, z, r.lhs, r.rhs, err, ok}, ok, err, {}};
            if (!r.tail_condition_ok) row.warnings.push_back(ch.label + ": " + r.note);
            return row;
          }));
  return rep;
}

Report identity_menz_otto(const RunConfig& cfg, const Measure1D& m, double tol) {
  const auto pairs = cov_pairs(m);
  const auto kinks = m.density().kink_points();
  Report rep;
  collect(rep, parallel_rows(cfg, pairs.size(), [&](std::size_t i) {
            const auto& p = pairs[i];
            const double lhs = cov_kernel_form(m, p.da, p.db, kinks);
            const double rhs = cov_direct(m, p.a, p.b, kinks);
            const double err = std::abs(lhs - rhs);
            const bool ok = identity_pass(err, rhs, tol);
            return Row{{std::string("menz-otto"), p.label, std::monostate{}, lhs, rhs, err, ok}, ok, err, {}};
          }));
  return rep;
}

Report identity_hoeffding(const RunConfig& cfg, double tol) {
  double lhs = 0.0, rhs = 0.0;
  std::string label;
  if (!cfg.model.empty()) {
    const auto model = parse_model(cfg.model);
    lhs = hoeffding_cov(bivariate_cdf(model));
    rhs = model_covariance(model);
    label = model.spec;
  } else {
    const Measure1D m(parse_density(require(cfg.measure, "--model or --measure", "identity hoeffding")));
    lhs = hoeffding_cov(comonotone_cdf(m));
    rhs = cov_direct(
        m, [](double x) { return x; }, [](double x) { return x; }, m.density().kink_points());
    label = m.density().name + ",Y=X";
  }
  const double err = std::abs(lhs - rhs);
  const bool ok = identity_pass(err, rhs, tol);
  Report rep;
  collect(rep, {Row{{std::string("hoeffding"), label, std::monostate{}, lhs, rhs, err, ok}, ok, err, {}}});
  return rep;
}

void put_meta(Report& rep, const RunConfig& cfg) {
  if (!cfg.model.empty()) rep.meta.emplace_back("model", cfg.model);
  if (!cfg.measure.empty()) rep.meta.emplace_back("measure", cfg.measure);
  if (!cfg.identity.empty()) rep.meta.emplace_back("identity", cfg.identity);
  if (!cfg.psi.empty()) rep.meta.emplace_back("psi", cfg.psi);
  rep.meta.emplace_back("seed", std::to_string(cfg.seed));
}

std::string csv_field(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) {
            if (ch == '"') q += '"';
            q += ch;
          }
          return q + "\"";
        }
      },
      c);
}

nlohmann::ordered_json json_value(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

std::vector<double> Range::points() const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
  return out;
}

Range parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw Error(ErrorCode::BadParameter, "range must be lo:hi:n, got '" + text + "'");
  Range r;
  r.lo = parse_number(parts[0], "range lo");
  r.hi = parse_number(parts[1], "range hi");
  const double n = parse_number(parts[2], "range n");
  if (n != std::floor(n) || n < 2 || n > 1e6) throw Error(ErrorCode::BadParameter, "range needs an integer n >= 2");
  r.n = static_cast<int>(n);
  if (!(r.lo <= r.hi)) throw Error(ErrorCode::BadParameter, "range needs lo <= hi");
  return r;
}

Report cmd_identity(const RunConfig& cfg) {
  const double tol = cfg.tol.value_or(1e-6);
  const std::string& id = require(cfg.identity, "--identity", "identity");
  Report rep;
  if (id == "hoeffding") {
    rep = identity_hoeffding(cfg, tol);
  } else {
    const Measure1D m(parse_density(require(cfg.measure, "--measure", "identity")));
    if (id == "density-recovery") {
      rep = identity_density_recovery(cfg, m, tol);
    } else if (id == "indicator") {
      rep = identity_indicator(cfg, m, tol);
    } else if (id == "menz-otto") {
      rep = identity_menz_otto(cfg, m, tol);
    } else {
      throw Error(ErrorCode::BadParameter,
                  "unknown identity '" + id + "' (menz-otto, indicator, density-recovery, hoeffding)");
    }
  }
  rep.command = "identity";
  rep.columns = {"identity", "label", "x", "lhs", "rhs", "abs_err", "pass"};
  put_meta(rep, cfg);
  rep.meta.emplace_back("tol", format_number(tol));
  return rep;
}

Report cmd_criterion(const RunConfig& cfg) {
  const auto model = parse_model(require(cfg.model, "--model", "criterion"));
  if (!cfg.s) throw Error(ErrorCode::BadParameter, "criterion needs --s lo:hi:n");
  const auto ss = cfg.s->points();
  Report rep;
  rep.command = "criterion";
  rep.columns = {"s", "holds_x", "holds_y", "min_value_x", "min_value_y", "witness_x", "witness_y", "skipped", "pass"};
  collect(rep, parallel_rows(cfg, ss.size(), [&](std::size_t i) {
            const auto c = criterion(model, ss[i]);
            const bool ok = c.holds();
            return Row{{ss[i], c.holds_x, c.holds_y, c.min_value_x, c.min_value_y, c.witness_x, c.witness_y,
                        static_cast<long long>(c.skipped), ok},
                       ok,
                       std::max(0.0, -c.min_value),
                       {}};
          }));
  put_meta(rep, cfg);
  rep.meta.emplace_back("model_canonical", model.spec);
  return rep;
}

Report cmd_efron_curve(const RunConfig& cfg) {
  const auto model = parse_model(require(cfg.model, "--model", "curve"));
  const auto psi = parse_psi(require(cfg.psi, "--psi", "curve"));
  if (!cfg.s) throw Error(ErrorCode::BadParameter, "curve needs --s lo:hi:n");
  const double tol = cfg.tol.value_or(1e-4);
  GridOracleConfig ocfg;
  ocfg.seed = cfg.seed;
  const auto ss = cfg.s->points();
  struct Pt {
    double I, oracle;
  };
  std::vector<Pt> pts(ss.size());
  parallel_rows(cfg, ss.size(), [&](std::size_t i) {
    pts[i] = {efron_I(model, psi, ss[i]), grid_conditional_expectation(model, psi, ss[i], ocfg)};
    return Row{};
  });
  std::vector<Row> rows;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double err = std::abs(pts[i].I - pts[i].oracle);
    const bool mono = i == 0 || pts[i].I - pts[i - 1].I >= kMonotoneSlack;
    const bool ok = err <= tol && mono;
    rows.push_back(Row{{ss[i], pts[i].I, pts[i].oracle, err, mono, ok}, ok, err, {}});
  }
  Report rep;
  rep.command = "curve";
  rep.columns = {"s", "I", "I_oracle", "abs_err", "monotone", "pass"};
  collect(rep, std::move(rows));
  put_meta(rep, cfg);
  rep.meta.emplace_back("tol", format_number(tol));
  return rep;
}

Report cmd_bound(const RunConfig& cfg) {
  const auto model = parse_model(require(cfg.model, "--model", "bound"));
  const auto psi = parse_psi(require(cfg.psi, "--psi", "bound"));
  std::vector<double> s0s;
  if (cfg.s0) {
    s0s = {*cfg.s0};
  } else if (cfg.s) {
    s0s = cfg.s->points();
  } else {
    throw Error(ErrorCode::BadParameter, "bound needs --s0 or --s");
  }
  BoundOptions opt;
  opt.tolerance = cfg.tol.value_or(1e-6);
  Report rep;
  rep.command = "bound";
  rep.columns = {"s0",      "I_prime",    "I_prime_fd",  "bound_x",         "bound_y",      "bound_mixed",
                 "sup_ratio_x", "sup_ratio_y", "E_d1psi", "E_d2psi", "criterion_holds", "psi_monotone", "claimed",
                 "degenerate",  "pass"};
  collect(rep, parallel_rows(cfg, s0s.size(), [&](std::size_t i) {
            const double s0 = s0s[i];
            const auto b = derivative_lower_bound(model, psi, s0, opt);
            const double h = 1e-4 * std::max(1.0, std::abs(s0));
            const double fd = (efron_I(model, psi, s0 + h) - efron_I(model, psi, s0 - h)) / (2.0 * h);
            const double err = std::abs(b.I_prime - fd);
            const bool ok = b.satisfied && err <= std::max(1e-4, 1e-3 * std::abs(b.I_prime));
            return Row{{s0, b.I_prime, fd, b.bound_x, b.bound_y, b.bound_mixed, b.sup_ratio_x, b.sup_ratio_y, b.E_d1psi,
                        b.E_d2psi, b.criterion_holds, b.psi_monotone, b.claimed,
                        static_cast<long long>(b.degenerate_points.size()), ok},
                       ok,
                       err,
                       b.warnings};
          }));
  put_meta(rep, cfg);
  rep.meta.emplace_back("tol", format_number(opt.tolerance));
  return rep;
}

void write_csv(const Report& r, std::ostream& os) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
}

void write_json(const Report& r, std::ostream& os) {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["command"] = r.command;
  for (const auto& [k, v] : r.meta) j[k] = v;
  j["columns"] = r.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) o[r.columns[i]] = json_value(row[i]);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  j["warnings"] = r.warnings;
  j["summary"] = {{"pass", r.pass}, {"fail", r.fail}, {"max_abs_err", r.max_abs_err}};
  os << j.dump(2) << '\n';
}

std::string summary_line(const Report& r) {
  return "RESULT pass=" + std::to_string(r.pass) + " fail=" + std::to_string(r.fail) +
         " max_abs_err=" + format_number(r.max_abs_err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monotone conditional expectations of sums and kernel covariance identities", "efronmono"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string s_text, format = "csv";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "joint model, family:key=value,...");
    sub->add_option("--measure", cfg.measure, "one-dimensional density, e.g. logistic or gamma(2)");
    sub->add_option("--psi", cfg.psi, "test function, e.g. x, tanh(x), ramp(1,0.5)");
    sub->add_option("--s", s_text, "grid lo:hi:n");
    sub->add_option("--s0", cfg.s0, "single point for bound");
    sub->add_option("--z", cfg.z, "threshold for the indicator identity");
    sub->add_option("--out", cfg.out, "report path (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", cfg.tol, "pass tolerance");
    sub->add_option("--seed", cfg.seed, "recorded in the report; the computations are deterministic");
    sub->add_option("--threads", cfg.threads, "worker threads (0: all cores); output does not depend on it")
        ->check(CLI::NonNegativeNumber);
  };
  auto* identity = app.add_subcommand("identity", "covariance identities on a one-dimensional measure");
  common(identity);
  identity->add_option("--identity", cfg.identity, "menz-otto, indicator, density-recovery or hoeffding")->required();
  auto* crit = app.add_subcommand("criterion", "Hessian criterion along x + y = s");
  common(crit);
  auto* curve = app.add_subcommand("curve", "I(s) against the grid oracle");
  curve->alias("efron-curve");
  common(curve);
  auto* bound = app.add_subcommand("bound", "derivative lower bound at s0");
  common(bound);

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!s_text.empty()) cfg.s = parse_range(s_text);
    cfg.format = format == "json" ? Format::Json : Format::Csv;
    Report rep;
    if (identity->parsed()) {
      cfg.command = Command::Identity;
      rep = cmd_identity(cfg);
    } else if (crit->parsed()) {
      cfg.command = Command::Criterion;
      rep = cmd_criterion(cfg);
    } else if (curve->parsed()) {
      cfg.command = Command::Curve;
      rep = cmd_efron_curve(cfg);
    } else {
      cfg.command = Command::Bound;
      rep = cmd_bound(cfg);
    }
    auto emit = [&](std::ostream& os) {
      if (cfg.format == Format::Json) {
        write_json(rep, os);
      } else {
        write_csv(rep, os);
      }
    };
    if (cfg.out.empty()) {
      emit(out);
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw Error(ErrorCode::BadParameter, "cannot write " + cfg.out);
      emit(f);
    }
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
    out << summary_line(rep) << '\n';
    return rep.fail > 0 ? 1 : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::NonConvergence:
      case ErrorCode::NonFiniteEvaluation:
      case ErrorCode::QuantileInversion:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace efron::cli
