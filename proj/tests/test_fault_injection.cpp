// Built with the ad_star sign flipped: the verification suite must notice.
#include <gmtk/verify.hpp>
#include <gtest/gtest.h>

using namespace gmtk;

TEST(FaultInjection, FlippedAdStarFailsDuality) {
  VerifyOptions opt;
  opt.suites = {"algebra"};
  auto r = run_verification(opt);
  int failed = 0;
  for (const auto& p : r) {
    if (p.name.rfind("ad_star_duality", 0) != 0) continue;
    if (p.name == "ad_star_duality[abelian:3]") {
      EXPECT_TRUE(p.pass);  // ad* vanishes, so the flip is invisible
      continue;
    }
    EXPECT_FALSE(p.pass) << p.name;
    EXPECT_GT(p.max_violation, 0.1) << p.name;
    ++failed;
  }
  EXPECT_EQ(failed, 2);
}

TEST(FaultInjection, FlippedAdStarBreaksReduction) {
  VerifyOptions opt;
  opt.suites = {"reduction"};
  EXPECT_FALSE(all_pass(run_verification(opt)));
}
