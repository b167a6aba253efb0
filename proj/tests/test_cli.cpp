#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;  // stdout only; stderr goes to err_file
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("gmtk_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome run(const std::string& args, const std::string& env = "") const {
    const std::string err_file = path("stderr.txt");
    const std::string cmd = env + " '" GMTK_CLI_PATH "' " + args + " 2>'" + err_file + "'";
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return {-1, "", "popen failed"};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int status = ::pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err_file)};
  }

  static std::string slurp(const std::string& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  static std::size_t lines(const std::string& s) {
    std::size_t c = 0;
    for (char ch : s) c += ch == '\n';
    return c;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateRigidBodyWritesHeaderPlusAllRows) {
  Outcome r = run("simulate --system free_rigid_body --integrator rkmk4 --dt 1e-3 --steps 10000 --out " + path("t.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path("t.csv"));
  EXPECT_EQ(lines(csv), 10002u);
  // summary on stdout carries the Casimir drift
  EXPECT_NE(r.out.find("casimir"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("status=ok"), std::string::npos) << r.out;
}

TEST_F(Cli, SimulateIsByteDeterministic) {
  const std::string args = "simulate --system rigid_body_potential --dt 1e-2 --steps 300 --out ";
  ASSERT_EQ(run(args + path("a.csv")).code, 0);
  ASSERT_EQ(run(args + path("b.csv")).code, 0);
  const std::string a = slurp(path("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.csv")));
}

TEST_F(Cli, ZeroStepsIsConfigError) {
  Outcome r = run("simulate --system free_rigid_body --steps 0 --out " + path("z.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, DegenerateLagrangianExitsTwo) {
  Outcome r = run("simulate --system linear_degenerate --equations el --steps 10 --out " + path("d.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("egenerate"), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedConfigIsExitOne) {
  write("bad.json", "{ \"system\": ");
  EXPECT_EQ(run("simulate --config " + path("bad.json")).code, 1);
  write("unknown.json", R"({"system": "free_rigid_body", "bogus": 3})");
  EXPECT_EQ(run("simulate --config " + path("unknown.json")).code, 1);
  write("wrongtype.json", R"({"system": "free_rigid_body", "integrator": {"dt": "fast"}})");
  EXPECT_EQ(run("simulate --config " + path("wrongtype.json")).code, 1);
  EXPECT_EQ(run("simulate --config " + path("missing.json")).code, 1);
  EXPECT_EQ(run("simulate --system no_such_system").code, 1);
}

TEST_F(Cli, BadFlagsAreExitOne) {
  EXPECT_EQ(run("verify --tol nonsense").code, 1);
  EXPECT_EQ(run("verify --tol x=abc").code, 1);
  EXPECT_EQ(run("simulate --dt -1").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  write("cfg.json", R"({"system": "free_rigid_body", "integrator": {"method": "rkmk4", "dt": 0.01, "steps": 50}})");
  ASSERT_EQ(run("simulate --config " + path("cfg.json") + " --steps 20 --out " + path("c.csv")).code, 0);
  EXPECT_EQ(lines(slurp(path("c.csv"))), 22u);
}

TEST_F(Cli, InvalidFdStepEnvironmentIsExitOne) {
  EXPECT_EQ(run("verify --suite algebra", "GMTK_FD_STEP=banana").code, 1);
  EXPECT_EQ(run("verify --suite algebra", "GMTK_FD_STEP=-1").code, 1);
  EXPECT_EQ(run("verify --suite algebra", "GMTK_FD_STEP=1e-5").code, 0);
}

TEST_F(Cli, VerifySuiteFilterAndDeterminism) {
  Outcome a = run("verify --suite reduction --out " + path("a.json"));
  Outcome b = run("verify --suite reduction --out " + path("b.json"));
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0);
  const std::string ja = slurp(path("a.json"));
  EXPECT_EQ(ja, slurp(path("b.json")));
  json j = json::parse(ja);
  EXPECT_TRUE(j["all_pass"].get<bool>());
  ASSERT_FALSE(j["properties"].empty());
  for (const auto& p : j["properties"]) {
    EXPECT_EQ(p["suite"], "reduction");
    for (const char* k : {"name", "samples", "max_violation", "tolerance", "pass"}) EXPECT_TRUE(p.contains(k)) << k;
  }
}

TEST_F(Cli, VerifyImpossibleToleranceFailsWithExitTwo) {
  Outcome r = run("verify --suite triplet --tol omega_is_d_theta1=0");
  EXPECT_EQ(r.code, 2);
  json j = json::parse(r.out);
  EXPECT_FALSE(j["all_pass"].get<bool>());
}

TEST_F(Cli, VerifyDifferentSeedChangesSamples) {
  Outcome a = run("verify --suite algebra --seed 1");
  Outcome b = run("verify --suite algebra --seed 2");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(a.out, b.out);
}

TEST_F(Cli, LegendreRigidBodyRoundtrip) {
  Outcome r = run("legendre --system free_rigid_body");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_FALSE(j["degenerate"].get<bool>());
  EXPECT_TRUE(j["rank_check_pass"].get<bool>());
  EXPECT_LE(j["max_roundtrip_error"].get<double>(), 1e-9);
}

TEST_F(Cli, LegendreLinearIsDegenerate) {
  Outcome r = run("legendre --system linear_degenerate");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_TRUE(j["degenerate"].get<bool>());
  EXPECT_TRUE(j["rank_check_pass"].get<bool>());
  EXPECT_TRUE(j["max_roundtrip_error"].is_null());
}

TEST_F(Cli, SubmanifoldIsotropy) {
  Outcome r = run("submanifold --system free_rigid_body --samples 50 --out " + path("s.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(slurp(path("s.json")));
  EXPECT_EQ(j["samples"], 50);
  EXPECT_LE(j["S"]["max_isotropy"].get<double>(), 1e-6);
  EXPECT_LE(j["Sprime"]["max_isotropy"].get<double>(), 1e-6);
  EXPECT_TRUE(j["reduced"]["pass"].get<bool>());
}

TEST_F(Cli, HelpExitsZero) {
  Outcome r = run("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}
