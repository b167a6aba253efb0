#include <gmtk/io.hpp>
#include <gmtk/verify.hpp>
#include <gtest/gtest.h>

using namespace gmtk;

namespace {

const std::vector<PropertyResult>& full_report() {
  static const std::vector<PropertyResult> r = run_verification({});
  return r;
}

}  // namespace

TEST(Verify, DefaultSeedPassesEverything) {
  const auto& r = full_report();
  ASSERT_FALSE(r.empty());
  for (const auto& p : r) EXPECT_TRUE(p.pass) << p.suite << "." << p.name << " violation " << p.max_violation;
  std::set<std::string> seen;
  for (const auto& p : r) seen.insert(p.suite);
  EXPECT_EQ(seen.size(), suite_names().size());
}

TEST(Verify, ReportIsOrderedBySuite) {
  const auto& r = full_report();
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LE(r[i - 1].suite, r[i].suite);
}

TEST(Verify, DeterministicUnderFixedSeed) {
  VerifyOptions opt;
  opt.suites = {"algebra", "reduction", "triplet"};
  std::string a = io::to_json(run_verification(opt)).dump();
  std::string b = io::to_json(run_verification(opt)).dump();
  EXPECT_EQ(a, b);
  opt.seed = 7;
  EXPECT_NE(io::to_json(run_verification(opt)).dump(), a);
}

TEST(Verify, SuiteFilter) {
  VerifyOptions opt;
  opt.suites = {"reduction"};
  auto r = run_verification(opt);
  ASSERT_FALSE(r.empty());
  for (const auto& p : r) EXPECT_EQ(p.suite, "reduction");
  opt.suites = {"nonsense"};
  EXPECT_THROW(run_verification(opt), StructuralError);
}

TEST(Verify, ToleranceOverride) {
  VerifyOptions opt;
  opt.suites = {"algebra"};
  opt.tolerances["ad_star_duality[so3]"] = -1.0;
  opt.tolerances["algebra.jacobi[heisenberg3]"] = 0.5;
  auto r = run_verification(opt);
  for (const auto& p : r) {
    if (p.name == "ad_star_duality[so3]") {
      EXPECT_FALSE(p.pass);
      EXPECT_EQ(p.tolerance, -1.0);
    } else {
      EXPECT_TRUE(p.pass) << p.name;
    }
    if (p.name == "jacobi[heisenberg3]") {
      EXPECT_EQ(p.tolerance, 0.5);
    }
  }
}

TEST(Verify, SampleOverride) {
  VerifyOptions opt;
  opt.suites = {"group"};
  opt.samples = 3;
  for (const auto& p : run_verification(opt)) EXPECT_EQ(p.samples, 3);
}

TEST(Io, AlgebraFromJson) {
  auto j = nlohmann::json::parse(R"({"name": "so3", "dim": 3, "c": [[0,1,2,1], [1,2,0,1], [2,0,1,1]]})");
  StructureAlgebra A = io::algebra_from_json(j);
  EXPECT_EQ(A.c(1, 0, 2), -1.0);
  EXPECT_EQ(A.c(0, 0, 0), 0.0);
  EXPECT_TRUE(validate(A).pass);
  StructureAlgebra R = so3_algebra();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) EXPECT_EQ(A.c(i, k, l), R.c(i, k, l));

  auto bad = nlohmann::json::parse(R"({"name": "x", "dim": 2, "c": [[0,1,2,1]]})");
  EXPECT_THROW(io::algebra_from_json(bad), ConfigError);
  EXPECT_THROW(io::algebra_from_json(nlohmann::json::parse(R"({"name": "x", "c": []})")), ConfigError);
  // Jacobi violations load and are reported by validate
  auto broken = nlohmann::json::parse(R"({"name": "b", "dim": 3, "c": [[0,1,1,1], [1,2,0,1]]})");
  EXPECT_FALSE(validate(io::algebra_from_json(broken)).pass);
}

TEST(Io, PointSerialization) {
  auto G = GroupModel::so3();
  TripletPoint p{G.identity(), DualVec{1, 2, 3}, AlgVec{4, 5, 6}, DualVec{7, 8, 9}};
  auto j = io::to_json(G, p);
  EXPECT_EQ(j["g"].size(), 3u);
  EXPECT_EQ(j["g"][1][1].get<double>(), 1.0);
  EXPECT_EQ(j["nu"][2].get<double>(), 9.0);
  auto A = GroupModel::abelian(2);
  EXPECT_EQ(io::to_json(A, A.element(Eigen::Vector2d(3, 4))).dump(), "[3.0,4.0]");
  ReducedPoint z{DualVec{1}, DualVec{2}, AlgVec{3}};
  EXPECT_EQ(io::to_json(z).dump(), R"({"lam":[1.0],"mu":[2.0],"xi":[3.0]})");
  EXPECT_EQ(io::number(std::numeric_limits<double>::infinity()).dump(), "\"inf\"");
}
