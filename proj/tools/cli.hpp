#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace efron::cli {

enum class Command { Identity, Criterion, Curve, Bound };
enum class Format { Csv, Json };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;

  std::vector<double> points() const;
};

// `lo:hi:n` with n >= 2; throws Error(BadParameter).
Range parse_range(const std::string& text);

struct RunConfig {
  Command command = Command::Identity;
  std::string model;
  std::string measure;
  std::string identity;
  std::string psi;
  std::optional<Range> s;
  std::optional<double> s0;
  std::optional<double> z;
  std::string out;  // empty: stdout
  Format format = Format::Csv;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
};

// monostate renders as an empty CSV field and JSON null.
using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> warnings;
  int pass = 0;
  int fail = 0;
  double max_abs_err = 0.0;
};

Report cmd_identity(const RunConfig& cfg);
Report cmd_criterion(const RunConfig& cfg);
Report cmd_efron_curve(const RunConfig& cfg);
Report cmd_bound(const RunConfig& cfg);

void write_csv(const Report& r, std::ostream& os);
void write_json(const Report& r, std::ostream& os);
std::string summary_line(const Report& r);

/// Parses argv, runs the command, writes the report and the summary line.
/// Exit codes: 0 all rows pass, 1 some row fails, 2 bad input or violated
/// hypothesis, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace efron::cli
