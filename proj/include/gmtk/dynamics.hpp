#ifndef GMTK_DYNAMICS_HPP
#define GMTK_DYNAMICS_HPP

#include <Eigen/Dense>

#include <algorithm>

#include "fields.hpp"
#include "reduction.hpp"
#include "triplet.hpp"

namespace gmtk {

/// Explicit form of the trivialized Euler-Lagrange equations.
struct ELVelocity {
  AlgVec gdot;  ///< right-trivialized, equals xi
  AlgVec xidot;
  double condition = 1.0;  ///< condition number of the fiber Hessian
};

/// d/dt(dL/dxi) - T*R_g(dL/dg) - ad*_xi(dL/dxi), with the time derivative
/// expanded along (gdot = xi, xidot).
inline DualVec el_residual(const LagrangianField& L, const GroupElement& g, const AlgVec& xi, const AlgVec& xidot) {
  const GroupModel& G = L.model;
  DualVec p = L.d_fiber(g, xi);
  Eigen::VectorXd dpdt = L.hess_fiber(g, xi) * xidot.v + L.mixed_group_fiber(g, xi) * xi.v;
  return DualVec(dpdt) - L.d_group(g, xi) - G.ad_star(xi, p);
}

inline ELVelocity el_vector_field(const LagrangianField& L, const GroupElement& g, const AlgVec& xi) {
  const GroupModel& G = L.model;
  DualVec rhs = L.d_group(g, xi) + G.ad_star(xi, L.d_fiber(g, xi));
  if (!L.reduced) rhs -= DualVec(Eigen::VectorXd(L.mixed_group_fiber(g, xi) * xi.v));
  ELVelocity v;
  v.gdot = xi;
  v.xidot = AlgVec(solve_nondegenerate(L.hess_fiber(g, xi), rhs.v, &v.condition));
  return v;
}

/// Euler-Poincare: [d2l/dxi2] xidot = ad*_xi(dl/dxi).
inline AlgVec euler_poincare_vf(const LagrangianField& l, const AlgVec& xi) {
  if (!l.reduced) throw StructuralError("euler_poincare_vf needs a reduced Lagrangian");
  return el_vector_field(l, l.model.identity(), xi).xidot;
}

struct HamiltonVelocity {
  AlgVec gdot;  ///< right-trivialized, equals dH/dmu
  DualVec mudot;
};

inline HamiltonVelocity hamilton_vector_field(const HamiltonianField& H, const PhaseState& s) {
  AlgVec w = H.d_fiber(s.g, s.mu);
  return {w, H.model.ad_star(w, s.mu) - H.d_group(s.g, s.mu)};
}

/// Lie-Poisson: mudot = ad*_{dh/dmu} mu.
inline DualVec lie_poisson_vf(const HamiltonianField& h, const DualVec& mu) {
  if (!h.reduced) throw StructuralError("lie_poisson_vf needs a reduced Hamiltonian");
  return hamilton_vector_field(h, {h.model.identity(), mu}).mudot;
}

/// <mu, [df/dmu, dk/dmu]>
inline double lie_poisson_bracket(const HamiltonianField& f, const HamiltonianField& k, const DualVec& mu) {
  const GroupModel& G = f.model;
  GroupElement e = G.identity();
  return pair(mu, G.bracket(f.d_fiber(e, mu), k.d_fiber(e, mu)));
}

inline double canonical_poisson_bracket(const HamiltonianField& F, const HamiltonianField& K, const PhaseState& s) {
  const GroupModel& G = F.model;
  AlgVec fm = F.d_fiber(s.g, s.mu), km = K.d_fiber(s.g, s.mu);
  return pair(K.d_group(s.g, s.mu), fm) - pair(F.d_group(s.g, s.mu), km) + pair(s.mu, G.bracket(fm, km));
}

// -- Lagrangian submanifolds of TT*G

/// (g, dL/dxi, xi, T*R_g dL/dg)
inline TripletPoint submanifold_S(const LagrangianField& L, const GroupElement& g, const AlgVec& xi) {
  return {g, L.d_fiber(g, xi), xi, L.d_group(g, xi)};
}

/// Distance of p from the submanifold generated by L (max over both dual equations).
inline double membership_S(const LagrangianField& L, const TripletPoint& p) {
  TripletPoint s = submanifold_S(L, p.g, p.xi);
  return std::max((p.mu - s.mu).max_abs(), (p.nu - s.nu).max_abs());
}

/// (g, mu, dH/dmu, -T*R_g dH/dg)
inline TripletPoint submanifold_Sprime(const HamiltonianField& H, const PhaseState& s) {
  return {s.g, s.mu, H.d_fiber(s.g, s.mu), -H.d_group(s.g, s.mu)};
}

inline double membership_Sprime(const HamiltonianField& H, const TripletPoint& p) {
  TripletPoint s = submanifold_Sprime(H, {p.g, p.mu});
  return std::max((p.xi - s.xi).max_abs(), (p.nu - s.nu).max_abs());
}

/// Image of dL in the trivialized T*TG.
inline CotTanPoint lagrangian_differential(const LagrangianField& L, const GroupElement& g, const AlgVec& xi) {
  return cotangent_TstarTG(L.model, g, xi, L.d_group(g, xi), L.d_fiber(g, xi));
}

/// Image of -dH in the trivialized T*T*G:
/// (g, mu, ad*_{dH/dmu} mu - T*R_g dH/dg, -dH/dmu).
inline CotCotPoint hamiltonian_differential(const HamiltonianField& H, const PhaseState& s) {
  return cotangent_TstarTstarG(H.model, s.g, s.mu, -H.d_group(s.g, s.mu), -H.d_fiber(s.g, s.mu));
}

// -- Dirac derivatives

/// (ad*_xi dl/dxi, dl/dxi, xi)
inline ReducedPoint lagrange_dirac(const LagrangianField& l, const AlgVec& xi) {
  if (!l.reduced) throw StructuralError("lagrange_dirac needs a reduced Lagrangian");
  DualVec p = l.d_fiber(l.model.identity(), xi);
  return {l.model.ad_star(xi, p), p, xi};
}

/// (ad*_{dh/dmu} mu, mu, dh/dmu)
inline ReducedPoint hamilton_dirac(const HamiltonianField& h, const DualVec& mu) {
  if (!h.reduced) throw StructuralError("hamilton_dirac needs a reduced Hamiltonian");
  AlgVec w = h.d_fiber(h.model.identity(), mu);
  return {h.model.ad_star(w, mu), mu, w};
}

/// Energy <dL/dxi, xi> - L.
inline double lagrangian_energy(const LagrangianField& L, const GroupElement& g, const AlgVec& xi) {
  return pair(L.d_fiber(g, xi), xi) - L.value(g, xi);
}

}  // namespace gmtk

#endif  // GMTK_DYNAMICS_HPP
