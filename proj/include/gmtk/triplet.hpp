#ifndef GMTK_TRIPLET_HPP
#define GMTK_TRIPLET_HPP

#include <utility>

#include "algebra.hpp"
#include "group.hpp"

namespace gmtk {

/// Point (g, mu, xi, nu) of the trivialized double bundle TT*G.
struct TripletPoint {
  GroupElement g;
  DualVec mu;
  AlgVec xi;
  DualVec nu;
};

/// Point (g, xi, alpha, beta) of the trivialized T*TG.
struct CotTanPoint {
  GroupElement g;
  AlgVec xi;
  DualVec alpha;
  DualVec beta;
};

/// Point (g, mu, alpha, eta) of the trivialized T*T*G.
struct CotCotPoint {
  GroupElement g;
  DualVec mu;
  DualVec alpha;
  AlgVec eta;
};

/// Generator (xi2, nu2, xi3, nu3) of a right invariant vector field on TT*G.
struct Generator {
  AlgVec xi2;
  DualVec nu2;
  AlgVec xi3;
  DualVec nu3;

  static Generator zero(int n) { return {AlgVec::zero(n), DualVec::zero(n), AlgVec::zero(n), DualVec::zero(n)}; }
};

/// Tangent vector at a TripletPoint; the group part is right-trivialized.
struct TripletTangent {
  TripletPoint base;
  AlgVec d_g;
  DualVec d_mu;
  AlgVec d_xi;
  DualVec d_nu;
};

// -- symplectic diffeomorphisms

/// (g, mu, xi, nu) -> (g, xi, nu + ad*_xi mu, mu)
inline CotTanPoint sigma(const GroupModel& G, const TripletPoint& p) {
  return {p.g, p.xi, p.nu + G.ad_star(p.xi, p.mu), p.mu};
}

inline TripletPoint sigma_inv(const GroupModel& G, const CotTanPoint& q) {
  return {q.g, q.beta, q.xi, q.alpha - G.ad_star(q.xi, q.beta)};
}

/// (g, mu, xi, nu) -> (g, mu, nu + ad*_xi mu, -xi)
inline CotCotPoint omega_flat(const GroupModel& G, const TripletPoint& p) {
  return {p.g, p.mu, p.nu + G.ad_star(p.xi, p.mu), -p.xi};
}

inline TripletPoint omega_sharp(const GroupModel& G, const CotCotPoint& r) {
  AlgVec xi = -r.eta;
  return {r.g, r.mu, xi, r.alpha - G.ad_star(xi, r.mu)};
}

// -- projections

inline std::pair<GroupElement, AlgVec> proj_Tpi(const TripletPoint& p) { return {p.g, p.xi}; }
inline std::pair<GroupElement, DualVec> proj_tau(const TripletPoint& p) { return {p.g, p.mu}; }
inline std::pair<GroupElement, AlgVec> proj_pi_TG(const CotTanPoint& q) { return {q.g, q.xi}; }
inline std::pair<GroupElement, DualVec> proj_pi_TstarG(const CotCotPoint& r) { return {r.g, r.mu}; }

// -- right invariant vector fields

inline TripletTangent right_invariant_vf(const GroupModel& G, const Generator& k, const TripletPoint& p) {
  return {p,
          k.xi2,
          k.nu2 + G.ad_star(k.xi2, p.mu),
          k.xi3 + G.bracket(p.xi, k.xi2),
          k.nu3 + G.ad_star(k.xi2, p.nu) - G.ad_star(p.xi, k.nu2)};
}

/// Exact inverse of right_invariant_vf by triangular substitution.
inline Generator tangent_to_generator(const GroupModel& G, const TripletPoint& p, const TripletTangent& t) {
  Generator k;
  k.xi2 = t.d_g;
  k.nu2 = t.d_mu - G.ad_star(k.xi2, p.mu);
  k.xi3 = t.d_xi - G.bracket(p.xi, k.xi2);
  k.nu3 = t.d_nu - G.ad_star(k.xi2, p.nu) + G.ad_star(p.xi, k.nu2);
  return k;
}

// -- potential one-forms and the symplectic two-form

/// theta1 = <nu, xi2> - <nu2, xi> + <mu, [xi, xi2]>
inline double theta1(const GroupModel& G, const TripletPoint& p, const Generator& k) {
  return pair(p.nu, k.xi2) - pair(k.nu2, p.xi) + pair(p.mu, G.bracket(p.xi, k.xi2));
}

/// theta2 = <mu, xi3> + <nu, xi2> + <mu, [xi, xi2]>
inline double theta2(const GroupModel& G, const TripletPoint& p, const Generator& k) {
  return pair(p.mu, k.xi3) + pair(p.nu, k.xi2) + pair(p.mu, G.bracket(p.xi, k.xi2));
}

inline double omega2(const GroupModel& G, const TripletPoint& p, const Generator& a, const Generator& b) {
  return pair(a.nu3, b.xi2) + pair(a.nu2, b.xi3) - pair(b.nu2, a.xi3) - pair(b.nu3, a.xi2) +
         pair(p.nu, G.bracket(a.xi2, b.xi2)) +
         pair(p.mu, G.bracket(a.xi3, b.xi2) + G.bracket(a.xi2, b.xi3) +
                        G.bracket(p.xi, G.bracket(a.xi2, b.xi2)));
}

/// Omega on two arbitrary tangents at the same point.
inline double omega2(const GroupModel& G, const TripletTangent& u, const TripletTangent& v) {
  return omega2(G, u.base, tangent_to_generator(G, u.base, u), tangent_to_generator(G, v.base, v));
}

// -- canonical potentials of the two cotangent bundles, in trivialized tuples.
// A tangent at a CotTanPoint is (a, d_xi, d_alpha, d_beta) with a right-trivialized.

struct CotTanTangent {
  AlgVec a;
  AlgVec d_xi;
  DualVec d_alpha;
  DualVec d_beta;
};

struct CotCotTangent {
  AlgVec a;
  DualVec d_mu;
  DualVec d_alpha;
  AlgVec d_eta;
};

/// Liouville form of T*TG: <alpha - ad*_xi beta, a> + <beta, d_xi>.
inline double liouville_TstarTG(const GroupModel& G, const CotTanPoint& q, const CotTanTangent& t) {
  return pair(q.alpha - G.ad_star(q.xi, q.beta), t.a) + pair(q.beta, t.d_xi);
}

/// Liouville form of T*T*G: <alpha + ad*_eta mu, a> + <d_mu, eta>.
inline double liouville_TstarTstarG(const GroupModel& G, const CotCotPoint& r, const CotCotTangent& t) {
  return pair(r.alpha + G.ad_star(r.eta, r.mu), t.a) + pair(t.d_mu, r.eta);
}

// -- adapters from untrivialized data (matrix groups and R^n)

/// Trivialized T*TG point of a differential: group covector alpha_g is right-trivialized,
/// alpha_xi is the fiber derivative.
inline CotTanPoint cotangent_TstarTG(const GroupModel& G, const GroupElement& g, const AlgVec& xi,
                                     const DualVec& alpha_g, const DualVec& alpha_xi) {
  return {g, xi, alpha_g + G.ad_star(xi, alpha_xi), alpha_xi};
}

/// Trivialized T*T*G point of a differential at (g, mu).
inline CotCotPoint cotangent_TstarTstarG(const GroupModel& G, const GroupElement& g, const DualVec& mu,
                                         const DualVec& alpha_g, const AlgVec& alpha_mu) {
  return {g, mu, alpha_g - G.ad_star(alpha_mu, mu), alpha_mu};
}

/// TT*G point of a curve (g(t), mu(t)) from its velocity: gdot right-trivialized.
inline TripletPoint from_velocity(const GroupModel& G, const GroupElement& g, const DualVec& mu,
                                  const AlgVec& gdot, const DualVec& mudot) {
  return {g, mu, gdot, mudot - G.ad_star(gdot, mu)};
}

/// Matrix-group version: gdot is the ambient velocity matrix.
inline TripletPoint from_matrix_velocity(const GroupModel& G, const GroupElement& g, const DualVec& mu,
                                         const Eigen::MatrixXd& gdot, const DualVec& mudot) {
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(gdot.data(), gdot.size());
  return from_velocity(G, g, mu, G.trivialize_ambient(g, w), mudot);
}

/// Reconstruction: the velocity (gdot, mudot) a TT*G point stands for.
inline std::pair<AlgVec, DualVec> reconstruct(const GroupModel& G, const TripletPoint& p) {
  return {p.xi, p.nu + G.ad_star(p.xi, p.mu)};
}

}  // namespace gmtk

#endif  // GMTK_TRIPLET_HPP
