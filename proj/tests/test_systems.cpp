#include <gmtk/systems.hpp>
#include <gtest/gtest.h>

#include <random>

using namespace gmtk;
using nlohmann::json;

namespace {

std::string config_error(const json& doc) {
  try {
    from_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Systems, BuiltinsArePopulated) {
  for (const auto& name : builtin_names()) {
    SystemSpec s = builtin(name);
    EXPECT_EQ(s.name, name);
    EXPECT_TRUE(s.lagrangian.has_value()) << name;
    EXPECT_TRUE(validate(s.model.algebra()).pass) << name;
    EXPECT_TRUE(s.initial.mu.has_value()) << name;
    EXPECT_TRUE(s.initial.xi.has_value()) << name;
    EXPECT_LE(s.model.constraint_residual(s.initial.g), 1e-12) << name;
  }
  SystemSpec f = builtin("free_rigid_body");
  EXPECT_EQ(f.model.id(), "so3");
  EXPECT_EQ(f.params.inertia, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(f.initial.mu->v, Eigen::Vector3d(1, 1, 1));
  EXPECT_LE((f.initial.xi->v - Eigen::Vector3d(1, 0.5, 1.0 / 3)).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_EQ(builtin("abelian_particle").model.id(), "abelian:3");
  EXPECT_EQ(builtin("heisenberg_free").model.id(), "heisenberg3");
  EXPECT_FALSE(builtin("linear_degenerate").hamiltonian.has_value());
  EXPECT_THROW(builtin("double_pendulum"), ConfigError);
}

TEST(Systems, BuiltinPairsAreLegendreConsistent) {
  for (const auto& name : builtin_names()) {
    SystemSpec s = builtin(name);
    if (!s.hamiltonian) continue;
    EXPECT_LE(legendre_pair_mismatch(*s.lagrangian, *s.hamiltonian), 1e-8) << name;
  }
}

TEST(Systems, AbelianParticleIsClassical) {
  SystemSpec s = builtin("abelian_particle");
  std::mt19937_64 rng(80);
  GroupElement q = s.model.random_element(rng);
  DualVec p = s.model.random_dual(rng);
  HamiltonVelocity v = hamilton_vector_field(*s.hamiltonian, {q, p});
  EXPECT_LE((v.gdot.v - p.v).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((v.mudot.v + q.vec()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Systems, PotentialGradientMatchesFiniteDifferences) {
  SystemSpec s = builtin("rigid_body_potential");
  std::mt19937_64 rng(81);
  for (int k = 0; k < 10; ++k) {
    GroupElement g = s.model.random_element(rng);
    DualVec fd = right_gradient(s.model, [&](const GroupElement& h) { return detail::potential(s.model, 1.0, h); }, g);
    EXPECT_LE((fd - detail::potential_gradient(s.model, 1.0, g)).max_abs(), 1e-9);
  }
}

TEST(Systems, ZeroPotentialReducesToFreeBody) {
  json doc = {{"system", {{"group", "so3"}, {"inertia", {1, 2, 3}}, {"potential_c", 0.0}}}};
  SystemSpec c0 = from_config(doc).spec;
  SystemSpec free = builtin("free_rigid_body");
  std::mt19937_64 rng(82);
  for (int k = 0; k < 10; ++k) {
    GroupElement g = c0.model.random_element(rng);
    AlgVec xi = c0.model.random_alg(rng);
    EXPECT_LE((el_vector_field(*c0.lagrangian, g, xi).xidot - euler_poincare_vf(*free.lagrangian, xi)).max_abs(), 1e-14);
  }
}

TEST(Systems, ConfigBuiltinWithInitialState) {
  json doc = json::parse(R"({"system": "rigid_body_potential",
                             "initial": {"g": [[1,0,0],[0,1,0],[0,0,1]], "mu": [0.5, 0.5, 0.5], "xi": null}})");
  ConfigResult r = from_config(doc);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.spec.initial.g.mat, Eigen::Matrix3d::Identity());
  EXPECT_EQ(r.spec.initial.mu->v, Eigen::Vector3d(0.5, 0.5, 0.5));
  EXPECT_LE((r.spec.initial.xi->v - Eigen::Vector3d(0.5, 0.25, 0.5 / 3)).cwiseAbs().maxCoeff(), 1e-16);

  json xi_only = json::parse(R"({"system": "free_rigid_body", "initial": {"xi": [1, 1, 1]}})");
  EXPECT_EQ(from_config(xi_only).spec.initial.mu->v, Eigen::Vector3d(1, 2, 3));
}

TEST(Systems, CustomSystems) {
  json doc = json::parse(R"({"system": {"group": "abelian", "dim": 2, "inertia": [2, 4], "potential_c": 0.5}})");
  ConfigResult r = from_config(doc);
  EXPECT_EQ(r.spec.model.id(), "abelian:2");
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_LE(legendre_pair_mismatch(*r.spec.lagrangian, *r.spec.hamiltonian), 1e-8);

  json full = json::parse(R"({"system": {"group": "so3", "inertia": [[2, 0.5, 0], [0.5, 1, 0], [0, 0, 3]]}})");
  ConfigResult f = from_config(full);
  EXPECT_TRUE(f.warnings.empty());
  GroupElement e = f.spec.model.identity();
  EXPECT_LE((f.spec.lagrangian->d_fiber(e, AlgVec{1, 0, 0}).v - Eigen::Vector3d(2, 0.5, 0)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((f.spec.lagrangian->d_fiber(e, *f.spec.initial.xi) - *f.spec.initial.mu).max_abs(), 1e-14);

  json lin = json::parse(R"({"system": {"group": "so3", "lagrangian": "linear", "linear_coeff": [1, 0, 0]}})");
  EXPECT_FALSE(from_config(lin).spec.hamiltonian.has_value());
}

TEST(Systems, InconsistentPairIsAcceptedWithWarning) {
  json doc = json::parse(R"({"system": {"group": "so3", "inertia": [1, 2, 3], "hamiltonian_inertia": [1, 1, 1]}})");
  ConfigResult r = from_config(doc);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("Legendre pair"), std::string::npos);
  EXPECT_TRUE(r.spec.lagrangian && r.spec.hamiltonian);
}

TEST(Systems, ConfigErrorsNameTheField) {
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "so3", "inertia": [1, 0, 3]}})")).find("system.inertia[1]"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "so3", "inertia": [[1, 0, 0], [0, -1, 0], [0, 0, 1]]}})"))
                .find("positive definite"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "so3", "inertia": [1, 2]}})")).find("system.inertia"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "so4"}})")).find("system.group"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "so3", "mass": 1}})")).find("system.mass"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": "nope"})")).find("unknown builtin"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"initial": {}})")).find("system"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"([1, 2])")).find("document"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": "free_rigid_body", "initial": {"mu": [1, "a", 2]}})"))
                .find("initial.mu[1]"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": "free_rigid_body", "initial": {"g": [[2,0,0],[0,1,0],[0,0,1]]}})"))
                .find("initial.g"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "heisenberg3", "potential_c": 1}})")).find("potential_c"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"system": {"group": "so3", "dim": 4}})")).find("system.dim"), std::string::npos);
}
