#ifndef GMTK_REDUCTION_HPP
#define GMTK_REDUCTION_HPP

#include <Eigen/Dense>

#include <optional>

#include "algebra.hpp"
#include "fields.hpp"
#include "group.hpp"
#include "triplet.hpp"

namespace gmtk {

/// Point (lam, mu, xi) of the reduced Tulczyjew space z_d = O x g* x g.
/// lam is the orbit coordinate Ad*_{g^-1} lambda stored as a plain dual vector.
struct ReducedPoint {
  DualVec lam;
  DualVec mu;
  AlgVec xi;
};

/// (lam, xi, mu) in the Lagrangian wing z_l.
struct ZlPoint {
  DualVec lam;
  AlgVec xi;
  DualVec mu;
};

/// (lam, mu, eta) in the Hamiltonian wing z_h.
struct ZhPoint {
  DualVec lam;
  DualVec mu;
  AlgVec eta;
};

/// Generator (eta, ups, zeta) of a reduced vector field.
struct ReducedGenerator {
  AlgVec eta;
  DualVec ups;
  AlgVec zeta;

  static ReducedGenerator zero(int n) { return {AlgVec::zero(n), DualVec::zero(n), AlgVec::zero(n)}; }
};

struct ReducedTangent {
  DualVec d_lam;
  DualVec d_mu;
  AlgVec d_xi;
};

// -- projections from the trivialized spaces

/// (g, mu, xi, nu) -> (Ad*_{g^-1} lambda, mu, xi) with lambda = nu + ad*_xi mu.
inline ReducedPoint project_TTstarG(const GroupModel& G, const TripletPoint& p) {
  DualVec lambda = p.nu + G.ad_star(p.xi, p.mu);
  return {G.Ad_star(G.inv(p.g), lambda), p.mu, p.xi};
}

/// (g, xi, lambda, nu) -> (Ad*_{g^-1} lambda, xi, nu).
inline ZlPoint project_TstarTG(const GroupModel& G, const CotTanPoint& q) {
  return {G.Ad_star(G.inv(q.g), q.alpha), q.xi, q.beta};
}

/// (g, mu, lambda, xi) -> (Ad*_{g^-1} lambda, mu, xi).
inline ZhPoint project_TstarTstarG(const GroupModel& G, const CotCotPoint& r) {
  return {G.Ad_star(G.inv(r.g), r.alpha), r.mu, r.eta};
}

// -- reduced diffeomorphisms

inline ZlPoint kappa(const ReducedPoint& z) { return {z.lam, z.xi, z.mu}; }
inline ReducedPoint kappa_inv(const ZlPoint& w) { return {w.lam, w.mu, w.xi}; }
inline ZhPoint omega_flat_red(const ReducedPoint& z) { return {z.lam, z.mu, -z.xi}; }
inline ReducedPoint omega_sharp_red(const ZhPoint& w) { return {w.lam, w.mu, -w.eta}; }

// -- vector fields and forms

/// (ad*_eta lam, ups + ad*_eta mu, zeta + [xi, eta])
inline ReducedTangent reduced_vf(const GroupModel& G, const ReducedGenerator& k, const ReducedPoint& z) {
  return {G.ad_star(k.eta, z.lam), k.ups + G.ad_star(k.eta, z.mu), k.zeta + G.bracket(z.xi, k.eta)};
}

/// Jacobi-Lie bracket of two reduced fields, as a generator.
inline ReducedGenerator reduced_bracket(const GroupModel& G, const ReducedGenerator& a, const ReducedGenerator& b) {
  return {G.bracket(a.eta, b.eta), G.ad_star(b.eta, a.ups) - G.ad_star(a.eta, b.ups),
          G.bracket(a.eta, b.zeta) - G.bracket(b.eta, a.zeta)};
}

struct ReducedGeneratorFit {
  ReducedGenerator gen;
  double orbit_residual = 0.0;  ///< least-squares residual of ad*_eta lam = d_lam
  bool tangent = true;          ///< false when the orbit slot leaves the orbit
};

/// Inverse of reduced_vf. ad*_(.) lam is not injective, so eta is the
/// minimum-norm least-squares solution and a residual above tol flags a
/// tangent that leaves the coadjoint orbit.
inline ReducedGeneratorFit tangent_to_reduced_generator(const GroupModel& G, const ReducedPoint& z,
                                                        const ReducedTangent& t, double tol = 1e-8) {
  Eigen::MatrixXd A = G.algebra().ad_star_in_eta(z.lam);
  Eigen::VectorXd eta = A.completeOrthogonalDecomposition().solve(t.d_lam.v);
  ReducedGeneratorFit fit;
  fit.orbit_residual = (A * eta - t.d_lam.v).norm();
  fit.tangent = fit.orbit_residual <= tol;
  AlgVec e(eta);
  fit.gen = {e, t.d_mu - G.ad_star(e, z.mu), t.d_xi - G.bracket(z.xi, e)};
  return fit;
}

/// chi1 = <lam, eta> - <ups, xi>
inline double chi1(const ReducedPoint& z, const ReducedGenerator& k) {
  return pair(z.lam, k.eta) - pair(k.ups, z.xi);
}

/// chi2 = <lam, eta> + <mu, zeta>
inline double chi2(const ReducedPoint& z, const ReducedGenerator& k) {
  return pair(z.lam, k.eta) + pair(z.mu, k.zeta);
}

/// <ups, zeta'> - <ups', zeta> - <lam, [eta, eta']>
inline double omega_zd(const GroupModel& G, const ReducedPoint& z, const ReducedGenerator& a,
                       const ReducedGenerator& b) {
  return pair(a.ups, b.zeta) - pair(b.ups, a.zeta) - pair(z.lam, G.bracket(a.eta, b.eta));
}

// -- embeddings of T*g and T*g*

inline ReducedPoint embed_kappa_hat(const GroupModel& G, const AlgVec& xi, const DualVec& mu) {
  return {G.ad_star(xi, mu), mu, xi};
}

inline ReducedPoint embed_omega_hat(const GroupModel& G, const DualVec& mu, const AlgVec& xi) {
  return {G.ad_star(xi, mu), mu, xi};
}

// -- Dirac identities, checked on the 3n basis generators

/// The k-th basis generator: k < n moves eta, then ups, then zeta.
inline ReducedGenerator basis_generator(int n, int k) {
  ReducedGenerator g = ReducedGenerator::zero(n);
  if (k < n) g.eta(k) = 1.0;
  else if (k < 2 * n) g.ups(k - n) = 1.0;
  else g.zeta(k - 2 * n) = 1.0;
  return g;
}

/// max over basis generators of |dl(tau_* X) - chi2(X)|, tau: z -> xi.
inline double dirac_identity_tau(const LagrangianField& l, const ReducedPoint& z) {
  const GroupModel& G = l.model;
  const int n = G.dim();
  DualVec dl = l.d_fiber(G.identity(), z.xi);
  double worst = 0.0;
  for (int k = 0; k < 3 * n; ++k) {
    ReducedGenerator gk = basis_generator(n, k);
    double lhs = pair(dl, reduced_vf(G, gk, z).d_xi);
    worst = std::max(worst, std::abs(lhs - chi2(z, gk)));
  }
  return worst;
}

/// max over basis generators of |-dh(pi_* X) - chi1(X)|, pi: z -> mu.
inline double dirac_identity_pi(const HamiltonianField& h, const ReducedPoint& z) {
  const GroupModel& G = h.model;
  const int n = G.dim();
  AlgVec dh = h.d_fiber(G.identity(), z.mu);
  double worst = 0.0;
  for (int k = 0; k < 3 * n; ++k) {
    ReducedGenerator gk = basis_generator(n, k);
    double lhs = -pair(reduced_vf(G, gk, z).d_mu, dh);
    worst = std::max(worst, std::abs(lhs - chi1(z, gk)));
  }
  return worst;
}

// -- orbit invariants

/// Group-specific invariants of a coadjoint orbit: |lam|^2 on so(3)*, the
/// center component on h3*, none for R^n.
inline std::vector<double> orbit_invariants(const GroupModel& G, const DualVec& lam) {
  switch (G.kind()) {
    case GroupKind::SO3: return {lam.v.squaredNorm()};
    case GroupKind::Heisenberg3: return {lam(2)};
    default: return {};
  }
}

}  // namespace gmtk

#endif  // GMTK_REDUCTION_HPP
