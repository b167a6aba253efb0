#ifndef GMTK_FIELDS_HPP
#define GMTK_FIELDS_HPP

#include <Eigen/Dense>

#include <functional>
#include <random>

#include "algebra.hpp"
#include "group.hpp"
#include "numerics.hpp"

namespace gmtk {

namespace detail {

/// Hessian by second differences of a scalar, used when no gradient is known.
template <class F>
Eigen::MatrixXd second_differences(F&& f, const Eigen::VectorXd& x, double h = 1e-4) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::VectorXd y = x;
        y(i) += si * h;
        y(j) += sj * h;
        return f(y);
      };
      H(i, j) = H(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  if (!H.allFinite()) throw EvaluationError("non-finite value in Hessian");
  return H;
}

}  // namespace detail

/// A field F(g, y) on G x V with y in the algebra (Lagrangian side) or its
/// dual (Hamiltonian side). Evaluators must be safe to call concurrently.
template <class Fiber, class FiberGrad>
struct PhaseField {
  using Eval = std::function<double(const GroupElement&, const Fiber&)>;
  using Grad = std::function<FiberGrad(const GroupElement&, const Fiber&)>;
  using GroupGrad = std::function<DualVec(const GroupElement&, const Fiber&)>;
  using Hess = std::function<Eigen::MatrixXd(const GroupElement&, const Fiber&)>;

  GroupModel model;
  Eval eval;
  Grad fiber_grad;       ///< optional analytic fiber derivative
  GroupGrad group_grad;  ///< optional analytic right group gradient
  Hess fiber_hess;       ///< optional analytic fiber Hessian
  bool reduced = false;  ///< eval ignores g
  FdOptions fd;

  double value(const GroupElement& g, const Fiber& y) const { return check_finite(eval(g, y), "field evaluation"); }

  FiberGrad d_fiber(const GroupElement& g, const Fiber& y) const {
    if (fiber_grad) return FiberGrad(check_finite(fiber_grad(g, y).v, "fiber gradient"));
    return FiberGrad(fd_gradient([&](const Eigen::VectorXd& v) { return value(g, Fiber(v)); }, y.v, fd));
  }

  /// T*_e R_g of the group differential; exactly zero for reduced fields.
  DualVec d_group(const GroupElement& g, const Fiber& y) const {
    if (reduced) return DualVec::zero(model.dim());
    if (group_grad) return DualVec(check_finite(group_grad(g, y).v, "group gradient"));
    return right_gradient(model, [&](const GroupElement& h) { return value(h, y); }, g, fd);
  }

  Eigen::MatrixXd hess_fiber(const GroupElement& g, const Fiber& y) const {
    if (fiber_hess) return fiber_hess(g, y);
    if (fiber_grad) {
      Eigen::MatrixXd H = fd_jacobian([&](const Eigen::VectorXd& v) { return d_fiber(g, Fiber(v)).v; }, y.v, fd);
      return 0.5 * (H + H.transpose());
    }
    return detail::second_differences([&](const Eigen::VectorXd& v) { return value(g, Fiber(v)); }, y.v);
  }

  /// Column i: derivative of the fiber gradient along exp(e e_i) g; zero when reduced.
  Eigen::MatrixXd mixed_group_fiber(const GroupElement& g, const Fiber& y) const {
    const int n = model.dim();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    if (reduced) return M;
    for (int i = 0; i < n; ++i) {
      AlgVec e = AlgVec::unit(n, i);
      M.col(i) = central_derivative_vec(
          [&](double t) -> Eigen::VectorXd { return d_fiber(perturb(model, g, e, t), y).v; }, fd);
    }
    return M;
  }

  /// Largest |F(g1, y) - F(g2, y)| over random samples; zero when the reduced flag is honest.
  template <class Rng>
  double reduced_violation(Rng& rng, int samples = 10) const {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      GroupElement g1 = model.random_element(rng), g2 = model.random_element(rng);
      Fiber y(model.random_alg(rng).v);
      worst = std::max(worst, std::abs(value(g1, y) - value(g2, y)));
    }
    return worst;
  }
};

/// L(g, xi) on G x g.
using LagrangianField = PhaseField<AlgVec, DualVec>;
/// H(g, mu) on G x g*.
using HamiltonianField = PhaseField<DualVec, AlgVec>;

/// Point of G x g*.
struct PhaseState {
  GroupElement g;
  DualVec mu;
};

/// Reduced Lagrangian l(xi); g is ignored.
inline LagrangianField reduced_lagrangian(GroupModel G, std::function<double(const AlgVec&)> l,
                                          std::function<DualVec(const AlgVec&)> grad = {},
                                          std::function<Eigen::MatrixXd(const AlgVec&)> hess = {}) {
  LagrangianField L;
  L.model = std::move(G);
  L.eval = [l](const GroupElement&, const AlgVec& x) { return l(x); };
  if (grad) L.fiber_grad = [grad](const GroupElement&, const AlgVec& x) { return grad(x); };
  if (hess) L.fiber_hess = [hess](const GroupElement&, const AlgVec& x) { return hess(x); };
  L.reduced = true;
  return L;
}

/// Reduced Hamiltonian h(mu); g is ignored.
inline HamiltonianField reduced_hamiltonian(GroupModel G, std::function<double(const DualVec&)> h,
                                            std::function<AlgVec(const DualVec&)> grad = {},
                                            std::function<Eigen::MatrixXd(const DualVec&)> hess = {}) {
  HamiltonianField H;
  H.model = std::move(G);
  H.eval = [h](const GroupElement&, const DualVec& m) { return h(m); };
  if (grad) H.fiber_grad = [grad](const GroupElement&, const DualVec& m) { return grad(m); };
  if (hess) H.fiber_hess = [hess](const GroupElement&, const DualVec& m) { return hess(m); };
  H.reduced = true;
  return H;
}

}  // namespace gmtk

#endif  // GMTK_FIELDS_HPP
