#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "efron/error.hpp"

using namespace efron;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "efronmono");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string last_line(const std::string& s) {
  auto t = s;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  const auto p = t.rfind('\n');
  return p == std::string::npos ? t : t.substr(p + 1);
}

}  // namespace

TEST(Cli, ParseRange) {
  const auto r = cli::parse_range("0:1:5");
  EXPECT_EQ(r.n, 5);
  const auto p = r.points();
  ASSERT_EQ(p.size(), 5u);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
  EXPECT_DOUBLE_EQ(p.back(), 1.0);
  EXPECT_THROW(cli::parse_range("0:1:1"), Error);
  EXPECT_THROW(cli::parse_range("1:0:3"), Error);
  EXPECT_THROW(cli::parse_range("a:b:c"), Error);
  EXPECT_THROW(cli::parse_range("0:1"), Error);
}

TEST(Cli, DensityRecoveryPasses) {
  const auto o = run_cli({"identity", "--identity", "density-recovery", "--measure", "logistic"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(last_line(o.out).rfind("RESULT pass=41 fail=0", 0), 0u) << last_line(o.out);
  EXPECT_NE(o.out.find("identity,label,x,lhs,rhs,abs_err,pass"), std::string::npos);
}

TEST(Cli, DensityRecoveryViolationExitsTwo) {
  const auto o = run_cli({"identity", "--identity", "density-recovery", "--measure", "exponential"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("HypothesisViolation"), std::string::npos);
}

TEST(Cli, IndicatorJson) {
  const auto o = run_cli({"identity", "--identity", "indicator", "--measure", "uniform(0,1)", "--z", "0.5", "--format",
                          "json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto body = o.out.substr(0, o.out.rfind("RESULT"));
  const auto j = nlohmann::json::parse(body);
  EXPECT_EQ(j["schema_version"], "1");
  EXPECT_EQ(j["command"], "identity");
  ASSERT_FALSE(j["rows"].empty());
  EXPECT_NEAR(j["rows"][0]["lhs"].get<double>(), 0.125, 1e-12);
  EXPECT_EQ(j["summary"]["fail"], 0);
}

TEST(Cli, MenzOttoAndHoeffding) {
  EXPECT_EQ(run_cli({"identity", "--identity", "menz-otto", "--measure", "gamma(2)"}).code, 0);
  EXPECT_EQ(run_cli({"identity", "--identity", "hoeffding", "--model", "morgenstern:theta=0.5"}).code, 0);
  EXPECT_EQ(run_cli({"identity", "--identity", "hoeffding", "--measure", "normal"}).code, 0);
}

TEST(Cli, CriterionExitCodes) {
  EXPECT_EQ(run_cli({"criterion", "--model", "morgenstern:theta=0.5", "--s", "0.2:1.8:5"}).code, 0);
  const auto bad = run_cli({"criterion", "--model", "frank:theta=2", "--s", "0.2:1.8:5"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("fail=5"), std::string::npos) << bad.out;
}

TEST(Cli, CurveMatchesClosedForm) {
  const auto o = run_cli({"curve", "--model", "independent:x=exponential,y=exponential", "--psi", "indicator(x>1)",
                          "--s", "2:4:3", "--format", "json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = nlohmann::json::parse(o.out.substr(0, o.out.rfind("RESULT")));
  ASSERT_EQ(j["rows"].size(), 3u);
  for (const auto& row : j["rows"]) {
    const double s = row["s"].get<double>();
    EXPECT_NEAR(row["I"].get<double>(), 1.0 - 1.0 / s, 1e-9);
  }
}

TEST(Cli, BoundRejectsIndicator) {
  EXPECT_EQ(run_cli({"bound", "--model", "gaussian", "--psi", "indicator(x>0)", "--s0", "0"}).code, 2);
  const auto ok = run_cli({"bound", "--model", "gaussian", "--psi", "x", "--s0", "0"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("bound_mixed"), std::string::npos);
}

TEST(Cli, BadInputExitsTwo) {
  EXPECT_EQ(run_cli({"criterion", "--model", "gumbel:theta=2", "--s", "0:1:3"}).code, 2);
  EXPECT_EQ(run_cli({"criterion", "--model", "gaussian", "--s", "1:0:3"}).code, 2);
  EXPECT_EQ(run_cli({"nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"curve", "--model", "gaussian"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, OutputFileAndSummaryOnStdout) {
  const auto path = std::filesystem::temp_directory_path() / "efron_cli_test.csv";
  const auto o = run_cli({"criterion", "--model", "gaussian", "--s", "0:1:2", "--out", path.string()});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out.rfind("RESULT pass=2 fail=0", 0), 0u) << o.out;
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header.rfind("s,holds_x,holds_y", 0), 0u);
  std::filesystem::remove(path);
}

TEST(Cli, OutputIndependentOfThreads) {
  const std::vector<std::string> base{"curve", "--model", "independent:x=logistic,y=gamma(2)", "--psi", "tanh(x)",
                                      "--s", "0.5:3:6"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = run_cli(one), b = run_cli(four);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
}
