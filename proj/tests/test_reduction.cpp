#include <gmtk/dynamics.hpp>
#include <gmtk/oracle.hpp>
#include <gmtk/reduction.hpp>
#include <gmtk/systems.hpp>
#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace gmtk;
using fixtures::shipped_groups;

namespace {

TripletPoint random_triplet(const GroupModel& G, std::mt19937_64& rng) { return fixtures::random_point(G, rng); }

ReducedPoint random_reduced(const GroupModel& G, std::mt19937_64& rng) {
  return {G.random_dual(rng), G.random_dual(rng), G.random_alg(rng)};
}

ReducedGenerator random_rgen(const GroupModel& G, std::mt19937_64& rng) {
  return {G.random_alg(rng), G.random_dual(rng), G.random_alg(rng)};
}

Eigen::VectorXd flat(const ReducedPoint& z) {
  const auto n = z.xi.size();
  Eigen::VectorXd v(3 * n);
  v << z.lam.v, z.mu.v, z.xi.v;
  return v;
}

Eigen::VectorXd flat(const ReducedTangent& t) {
  const auto n = t.d_xi.size();
  Eigen::VectorXd v(3 * n);
  v << t.d_lam.v, t.d_mu.v, t.d_xi.v;
  return v;
}

ReducedPoint unflat(const Eigen::VectorXd& v) {
  const auto n = v.size() / 3;
  return {DualVec(v.segment(0, n)), DualVec(v.segment(n, n)), AlgVec(v.segment(2 * n, n))};
}

/// Reduced Lagrangian/Hamiltonian pairs on the shipped groups.
std::vector<std::pair<LagrangianField, HamiltonianField>> reduced_pairs() {
  return {detail::mechanical_pair(GroupModel::so3(), Eigen::Vector3d(1, 2, 3), 0.0),
          detail::mechanical_pair(GroupModel::heisenberg3(), Eigen::Vector3d(1, 1.5, 2), 0.0),
          detail::mechanical_pair(GroupModel::abelian(3), Eigen::Vector3d(1, 1, 2), 0.0)};
}

double max_diff(const ReducedPoint& a, const ReducedPoint& b) { return (flat(a) - flat(b)).cwiseAbs().maxCoeff(); }

/// Derivative of z -> chi(z, k) along the reduced field of a, holding the orbit slot fixed.
template <class Chi>
double frozen_derivative(const GroupModel& G, Chi chi, const ReducedPoint& z, const ReducedGenerator& a,
                         const ReducedGenerator& k) {
  ReducedTangent t = reduced_vf(G, a, z);
  // chi is affine in (mu, xi), so a unit step is exact
  return central_derivative(
      [&](double e) {
        ReducedPoint q{z.lam, z.mu + e * t.d_mu, z.xi + e * t.d_xi};
        return chi(q, k);
      },
      FdOptions{1.0, false});
}

}  // namespace

TEST(Reduction, ProjectionExamples) {
  auto G = GroupModel::so3();
  TripletPoint p{G.identity(), DualVec{1, 2, 3}, AlgVec{1, 1, 1}, DualVec{0, 0, 0}};
  ReducedPoint z = project_TTstarG(G, p);
  EXPECT_LE((z.lam.v - G.ad_star(AlgVec{1, 1, 1}, DualVec{1, 2, 3}).v).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(z.mu.v, p.mu.v);
  EXPECT_EQ(z.xi.v, p.xi.v);

  auto A = GroupModel::abelian(3);
  std::mt19937_64 rng(50);
  TripletPoint pa = random_triplet(A, rng);
  ReducedPoint za = project_TTstarG(A, pa);
  EXPECT_EQ(za.lam.v, pa.nu.v);
}

TEST(Reduction, DiffeomorphismsDescend) {
  std::mt19937_64 rng(51);
  for (const auto& G : shipped_groups()) {
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      TripletPoint p = random_triplet(G, rng);
      ReducedPoint z = project_TTstarG(G, p);
      worst = std::max(worst, max_diff(kappa_inv(project_TstarTG(G, sigma(G, p))), z));
      worst = std::max(worst, max_diff(omega_sharp_red(project_TstarTstarG(G, omega_flat(G, p))), z));
      ZlPoint k = kappa(z);
      ZlPoint k2 = project_TstarTG(G, sigma(G, p));
      worst = std::max(worst, (k.lam - k2.lam).max_abs() + (k.mu - k2.mu).max_abs() + (k.xi - k2.xi).max_abs());
    }
    EXPECT_LE(worst, 1e-12) << G.id();
  }
}

TEST(Reduction, ReducedMapsRoundTrip) {
  std::mt19937_64 rng(52);
  for (const auto& G : shipped_groups()) {
    ReducedPoint z = random_reduced(G, rng);
    EXPECT_EQ(max_diff(kappa_inv(kappa(z)), z), 0.0);
    EXPECT_EQ(max_diff(omega_sharp_red(omega_flat_red(z)), z), 0.0);
    EXPECT_EQ((omega_flat_red(z).eta + z.xi).max_abs(), 0.0);
  }
}

TEST(Reduction, GeneratorRoundTrip) {
  std::mt19937_64 rng(53);
  for (const auto& G : shipped_groups()) {
    for (int s = 0; s < 20; ++s) {
      ReducedPoint z = random_reduced(G, rng);
      ReducedGenerator k = random_rgen(G, rng);
      ReducedTangent t = reduced_vf(G, k, z);
      ReducedGeneratorFit fit = tangent_to_reduced_generator(G, z, t);
      ASSERT_TRUE(fit.tangent) << G.id();
      // eta is recovered up to the isotropy of lam; the field is recovered exactly
      ReducedTangent t2 = reduced_vf(G, fit.gen, z);
      EXPECT_LE((flat(t2) - flat(t)).cwiseAbs().maxCoeff(), 1e-10) << G.id();
    }
  }
  auto G = GroupModel::so3();
  ReducedPoint z{DualVec{0, 0, 1}, DualVec{1, 0, 0}, AlgVec{0, 1, 0}};
  ReducedTangent off{DualVec{0, 0, 1}, DualVec::zero(3), AlgVec::zero(3)};
  EXPECT_FALSE(tangent_to_reduced_generator(G, z, off).tangent);
}

TEST(Reduction, BracketMatchesFieldBracket) {
  std::mt19937_64 rng(54);
  for (const auto& G : shipped_groups()) {
    for (int s = 0; s < 10; ++s) {
      ReducedPoint z = random_reduced(G, rng);
      ReducedGenerator a = random_rgen(G, rng), b = random_rgen(G, rng);
      auto X = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return flat(reduced_vf(G, a, unflat(v))); };
      auto Y = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return flat(reduced_vf(G, b, unflat(v))); };
      Eigen::VectorXd fd = oracle::vector_bracket(X, Y, flat(z));
      Eigen::VectorXd closed = flat(reduced_vf(G, reduced_bracket(G, a, b), z));
      EXPECT_LE((fd - closed).cwiseAbs().maxCoeff(), 1e-8) << G.id();
    }
  }
}

TEST(Reduction, FormExamples) {
  auto G = GroupModel::so3();
  ReducedPoint z{DualVec{1, 0, 0}, DualVec{0, 1, 0}, AlgVec{0, 0, 1}};
  ReducedGenerator k{AlgVec{1, 0, 0}, DualVec{0, 0, 2}, AlgVec{0, 3, 0}};
  EXPECT_EQ(chi1(z, k), 1.0 - 2.0);
  EXPECT_EQ(chi2(z, k), 1.0 + 3.0);
  ReducedGenerator a{AlgVec{1, 0, 0}, DualVec::zero(3), AlgVec::zero(3)};
  ReducedGenerator b{AlgVec{0, 1, 0}, DualVec::zero(3), AlgVec::zero(3)};
  // <lam, [e1, e2]> = <e1, e3> = 0 ; with lam = e3 it is 1
  ReducedPoint w{DualVec{0, 0, 1}, DualVec::zero(3), AlgVec::zero(3)};
  EXPECT_EQ(omega_zd(G, w, a, b), -1.0);
  ReducedGenerator c{AlgVec::zero(3), DualVec{1, 0, 0}, AlgVec::zero(3)};
  ReducedGenerator d{AlgVec::zero(3), DualVec::zero(3), AlgVec{1, 0, 0}};
  EXPECT_EQ(omega_zd(G, w, c, d), 1.0);
  EXPECT_EQ(omega_zd(G, w, d, c), -1.0);
}

TEST(Reduction, OmegaIsDifferentialOfBothPotentials) {
  std::mt19937_64 rng(55);
  for (const auto& G : shipped_groups()) {
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
      ReducedPoint z = random_reduced(G, rng);
      ReducedGenerator a = random_rgen(G, rng), b = random_rgen(G, rng);
      ReducedGenerator ab = reduced_bracket(G, a, b);
      double om = omega_zd(G, z, a, b);
      auto d = [&](auto chi) {
        return frozen_derivative(G, chi, z, a, b) - frozen_derivative(G, chi, z, b, a) - chi(z, ab);
      };
      worst = std::max(worst, std::abs(d([](const ReducedPoint& q, const ReducedGenerator& k) { return chi1(q, k); }) - om));
      worst = std::max(worst, std::abs(d([](const ReducedPoint& q, const ReducedGenerator& k) { return chi2(q, k); }) - om));
    }
    EXPECT_LE(worst, 1e-12) << G.id();
  }
}

TEST(Reduction, RightInvariantFieldsDescend) {
  std::mt19937_64 rng(56);
  for (const auto& G : shipped_groups()) {
    for (int s = 0; s < 10; ++s) {
      TripletPoint p = random_triplet(G, rng);
      DualVec lambda = p.nu + G.ad_star(p.xi, p.mu);
      Generator k = fixtures::random_generator(G, rng);
      // choose nu3 so the unreduced momentum lambda is left unchanged
      k.nu3 = DualVec::zero(G.dim()) - G.ad_star(k.xi3, p.mu) - G.ad_star(k.xi2, lambda);
      TripletTangent t = right_invariant_vf(G, k, p);
      auto proj = [&](const oracle::Point& q) {
        ReducedPoint z = project_TTstarG(G, oracle::to_triplet(q));
        return oracle::Point{G.identity(), flat(z)};
      };
      oracle::Tangent pushed = oracle::pushforward(G, G, proj, oracle::to_point(p), oracle::to_tangent(t));
      ReducedTangent expect = reduced_vf(G, {k.xi2, k.nu2, k.xi3}, project_TTstarG(G, p));
      EXPECT_LE((pushed.b - flat(expect)).cwiseAbs().maxCoeff(), 1e-6) << G.id();
    }
  }
}

TEST(Reduction, ProjectionStaysOnCoadjointOrbit) {
  std::mt19937_64 rng(57);
  for (const auto& G : shipped_groups()) {
    for (int s = 0; s < 20; ++s) {
      TripletPoint p = random_triplet(G, rng);
      DualVec lambda = p.nu + G.ad_star(p.xi, p.mu);
      auto a = orbit_invariants(G, lambda), b = orbit_invariants(G, project_TTstarG(G, p).lam);
      ASSERT_EQ(a.size(), b.size());
      for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * (1 + std::abs(a[i]))) << G.id();
    }
  }
  EXPECT_TRUE(orbit_invariants(GroupModel::abelian(2), DualVec{1, 2}).empty());
}

TEST(Reduction, ReducedFieldsAreTangentToOrbits) {
  std::mt19937_64 rng(58);
  for (const auto& G : shipped_groups()) {
    ReducedPoint z = random_reduced(G, rng);
    ReducedGenerator k = random_rgen(G, rng);
    ReducedTangent t = reduced_vf(G, k, z);
    auto inv = [&](double e) {
      auto v = orbit_invariants(G, z.lam + e * t.d_lam);
      Eigen::VectorXd r(v.size());
      for (size_t i = 0; i < v.size(); ++i) r(i) = v[i];
      return r;
    };
    Eigen::VectorXd d = central_derivative_vec(inv);
    if (d.size()) {
      EXPECT_LE(d.cwiseAbs().maxCoeff(), 1e-9) << G.id();
    }
  }
}

TEST(Reduction, DiracIdentities) {
  std::mt19937_64 rng(59);
  for (const auto& [l, h] : reduced_pairs()) {
    const GroupModel& G = l.model;
    const std::string name = G.id();
    for (int k = 0; k < 10; ++k) {
      ReducedPoint zl = lagrange_dirac(l, G.random_alg(rng));
      EXPECT_LE(dirac_identity_tau(l, zl), 1e-8) << name;
      ReducedPoint zh = hamilton_dirac(h, G.random_dual(rng));
      EXPECT_LE(dirac_identity_pi(h, zh), 1e-8) << name;
      ReducedPoint bad = zl;
      bad.mu(0) += 0.1;
      EXPECT_NEAR(dirac_identity_tau(l, bad), 0.1, 1e-8) << name;
      ReducedPoint badh = zh;
      badh.xi(0) += 0.1;
      EXPECT_GT(dirac_identity_pi(h, badh), 1e-3) << name;
    }
  }
}

TEST(Reduction, EmbeddingsMatchDiracPoints) {
  auto G = GroupModel::so3();
  SystemSpec s = builtin("free_rigid_body");
  AlgVec xi{0.3, -0.2, 1};
  ReducedPoint a = lagrange_dirac(*s.lagrangian, xi);
  ReducedPoint b = embed_kappa_hat(G, xi, a.mu);
  EXPECT_LE(max_diff(a, b), 1e-15);
  DualVec mu{1, 2, -1};
  ReducedPoint c = hamilton_dirac(*s.hamiltonian, mu);
  ReducedPoint d = embed_omega_hat(G, mu, c.xi);
  EXPECT_LE(max_diff(c, d), 1e-15);
}

TEST(Reduction, ReducedDiracImagesAreIsotropic) {
  // curves in the image move across orbits, so generators carry eta = 0
  std::mt19937_64 rng(60);
  for (const auto& [l, h] : reduced_pairs()) {
    const GroupModel& G = l.model;
    const std::string name = G.id();
    const int n = G.dim();
    AlgVec xi = G.random_alg(rng);
    std::vector<ReducedGenerator> gens;
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd d = central_derivative_vec([&](double e) -> Eigen::VectorXd {
        return flat(lagrange_dirac(l, xi + e * AlgVec::unit(n, j)));
      });
      ReducedTangent t{DualVec(d.segment(0, n)), DualVec(d.segment(n, n)), AlgVec(d.segment(2 * n, n))};
      gens.push_back({AlgVec::zero(n), t.d_mu, t.d_xi});
    }
    ReducedPoint z = lagrange_dirac(l, xi);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) EXPECT_LE(std::abs(omega_zd(G, z, gens[i], gens[j])), 1e-6) << name;
  }
}
