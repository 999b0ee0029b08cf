#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int status = -1;
  std::string out;  // stdout and stderr merged
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(CIFS_BINARY) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cifs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& sub = "") const { return " --out " + (dir_ / sub).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FixedPointsEx1) {
  const CliRun r = cli("fixed-points --family EX1 --N 3 --k 1 --no-timestamp" + out());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(slurp(dir_ / "P.csv"), "0.25\n0.33333333333333331\n0.5\n");
  EXPECT_EQ(slurp(dir_ / "D.csv"), slurp(dir_ / "P.csv"));
  const json j = json::parse(slurp(dir_ / "fixed-points.json"));
  EXPECT_EQ(j["P"]["points"], 3);
  EXPECT_FALSE(j.contains("timestamp"));
}

TEST_F(Cli, FixedPointsDyadic) {
  ASSERT_EQ(cli("fixed-points --family DYADIC --k 2" + out()).status, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "fixed-points.json"))["P"]["points"], 4);
}

TEST_F(Cli, UsageErrors) {
  const CliRun k0 = cli("fixed-points --family DYADIC --k 0" + out());
  EXPECT_EQ(k0.status, 2);
  EXPECT_EQ(k0.out.rfind("error: E_USAGE:", 0), 0u) << k0.out;
  const CliRun unknown = cli("fixed-points --family NOPE" + out());
  EXPECT_EQ(unknown.status, 2);
  EXPECT_NE(unknown.out.find("error: E_"), std::string::npos);
  EXPECT_EQ(cli("bogus").status, 2);
  const CliRun budget = cli("fixed-points --family EX1 --N 1000 --k 6" + out());
  EXPECT_EQ(budget.status, 2);
  EXPECT_NE(budget.out.find("E_BUDGET_EXCEEDED"), std::string::npos) << budget.out;
  // one line, machine-parseable
  EXPECT_EQ(std::count(budget.out.begin(), budget.out.end(), '\n'), 1);
}

TEST_F(Cli, ConfigErrorsCarryPositions) {
  std::ofstream(dir_ / "bad.json") << R"json({"name": "bad", "dimension": 1, "truncation": 3,
    "branches": [{"ratio": "1/(i+1", "translation": ["0"]}]})json";
  const CliRun r = cli("fixed-points --config " + (dir_ / "bad.json").string() + out());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("error: E_"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("position"), std::string::npos) << r.out;
}

TEST_F(Cli, AttractorRefusalAndForce) {
  const CliRun strict = cli("attractor --family EX1 --N 50" + out());
  EXPECT_EQ(strict.status, 2);
  EXPECT_NE(strict.out.find("E_REFUSED"), std::string::npos);
  const CliRun forced = cli("attractor --family EX1 --N 50 --force-truncate --no-timestamp" + out());
  ASSERT_EQ(forced.status, 0) << forced.out;
  EXPECT_TRUE(json::parse(slurp(dir_ / "attractor.json"))["converged"].get<bool>());

  ASSERT_EQ(cli("attractor --family DYADIC --tol 1e-3" + out()).status, 0);
  EXPECT_TRUE(json::parse(slurp(dir_ / "attractor.json"))["converged"].get<bool>());
  ASSERT_EQ(cli("attractor --family SINGLE" + out()).status, 0);
  EXPECT_EQ(slurp(dir_ / "attractor.csv"), "0\n");
}

TEST_F(Cli, ChaosDeterministicBytes) {
  const std::string args = "chaos --family EX2 --N 10 --rho geometric:1/2 --samples 20000 --no-timestamp";
  ASSERT_EQ(cli(args + out("a")).status, 0);
  ASSERT_EQ(cli(args + out("b")).status, 0);
  for (const char* f : {"samples.csv", "support.csv", "chaos.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  ASSERT_EQ(cli(args + " --seed 7" + out("c")).status, 0);
  EXPECT_NE(slurp(dir_ / "a" / "samples.csv"), slurp(dir_ / "c" / "samples.csv"));
}

TEST_F(Cli, ChaosDyadicResidual) {
  ASSERT_EQ(cli("chaos --family DYADIC" + out()).status, 0);
  const json j = json::parse(slurp(dir_ / "chaos.json"));
  EXPECT_EQ(j["n"], 1000000);
  EXPECT_LE(j["residual"].get<double>(), 5e-3);
  EXPECT_TRUE(j.contains("timestamp"));
}

TEST_F(Cli, ChaosCompareP) {
  const CliRun r = cli("chaos --family EX1 --N 20 --rho geometric:1/2 --multistart --burn-in 0 --compare-P 6" + out());
  ASSERT_EQ(r.status, 0) << r.out;
  const json c = json::parse(slurp(dir_ / "chaos.json"))["compare_P"];
  EXPECT_LE(c["hausdorff_support_P"].get<double>(), c["bound"].get<double>());
  EXPECT_TRUE(c["within_bound"].get<bool>());
}

TEST_F(Cli, ConfigRunSectionAndFlagOverride) {
  std::ofstream(dir_ / "g.json") << R"json({"name": "G", "dimension": 1, "truncation": 4,
    "branches": [{"ratio": "1/(i+2)", "translation": ["1/(i+1)"]}],
    "run": {"k": 1}})json";
  ASSERT_EQ(cli("fixed-points --config " + (dir_ / "g.json").string() + out()).status, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "fixed-points.json"))["P"]["points"], 4);
  ASSERT_EQ(cli("fixed-points --config " + (dir_ / "g.json").string() + " --N 2" + out()).status, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "fixed-points.json"))["P"]["points"], 2);
}

TEST_F(Cli, VerifyClaims) {
  const CliRun y = cli("verify --claim example2-unbounded --imax 100 --no-timestamp" + out());
  ASSERT_EQ(y.status, 0) << y.out;
  const json j = json::parse(slurp(dir_ / "verify.json"));
  const json& m = j["claims"][0]["measured"];
  EXPECT_NEAR(m["max_abs_y"]["value"].get<double>(), 100.497, 1e-3);
  EXPECT_EQ(m["max_abs_y"]["exact"], "20200/201");

  const CliRun na = cli("verify --claim nondecreasing --family EX2" + out());
  EXPECT_EQ(na.status, 0) << na.out;
  EXPECT_EQ(json::parse(slurp(dir_ / "verify.json"))["claims"][0]["status"], "not-applicable");

  EXPECT_EQ(cli("verify --claim no-such-claim" + out()).status, 2);
}

TEST_F(Cli, VerifyOutputIsDeterministicWithoutTimestamp) {
  const std::string args = "verify --claim dsl --claim kravchenko --no-timestamp";
  ASSERT_EQ(cli(args + out("a")).status, 0);
  ASSERT_EQ(cli(args + out("b")).status, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "verify.json"), slurp(dir_ / "b" / "verify.json"));
}

TEST_F(Cli, ShowDefaults) {
  const CliRun r = cli("--show-defaults");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["N"], 100);
  EXPECT_EQ(j["k"], 6);
  EXPECT_EQ(j["tol"], 1e-3);
  EXPECT_EQ(j["samples"], 1000000);
  EXPECT_EQ(j["burn_in"], 1000);
  EXPECT_EQ(j["cell"], "1/128");
  EXPECT_EQ(j["seed"], 42);
}
