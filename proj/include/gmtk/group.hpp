#ifndef GMTK_GROUP_HPP
#define GMTK_GROUP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

#include "algebra.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace gmtk {

enum class GroupKind { SO3, Heisenberg3, Abelian };

/// Element of a shipped group. Matrix groups keep a 3x3 matrix; the abelian
/// group R^n keeps its translation vector as an n x 1 column.
struct GroupElement {
  GroupKind kind = GroupKind::Abelian;
  int dim = 0;  ///< algebra dimension, distinguishes R^n for different n
  Eigen::MatrixXd mat;

  Eigen::VectorXd vec() const { return Eigen::Map<const Eigen::VectorXd>(mat.data(), mat.size()); }
};

/// Matrix realization of a group together with its algebra.
///
/// Sign convention: the algebra bracket is the Jacobi-Lie bracket of right
/// invariant vector fields X(g) = hat(xi) g, which is minus the matrix
/// commutator. hat is therefore an anti-homomorphism,
/// hat([xi, eta]) = -(hat(xi) hat(eta) - hat(eta) hat(xi)). With the shipped
/// structure constants this makes so(3)'s hat(xi) = -skew(xi).
class GroupModel {
 public:
  GroupModel() = default;

  static GroupModel so3() { return GroupModel(GroupKind::SO3, so3_algebra()); }
  static GroupModel heisenberg3() { return GroupModel(GroupKind::Heisenberg3, heisenberg3_algebra()); }
  static GroupModel abelian(int n) {
    if (n <= 0) throw StructuralError("abelian group dimension must be positive");
    return GroupModel(GroupKind::Abelian, abelian_algebra(n));
  }

  /// "so3", "heisenberg3" or "abelian:n".
  static GroupModel from_name(const std::string& id) {
    if (id == "so3") return so3();
    if (id == "heisenberg3") return heisenberg3();
    if (id.rfind("abelian:", 0) == 0) {
      const std::string tail = id.substr(8);
      std::size_t used = 0;
      int n = 0;
      try {
        n = std::stoi(tail, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == tail.size() && !tail.empty() && n > 0 && n <= 64) return abelian(n);
    }
    throw StructuralError("unknown group id '" + id + "' (expected so3, heisenberg3 or abelian:n)");
  }

  GroupKind kind() const { return kind_; }
  int dim() const { return alg_.dim(); }
  const StructureAlgebra& algebra() const { return alg_; }
  std::string id() const {
    switch (kind_) {
      case GroupKind::SO3: return "so3";
      case GroupKind::Heisenberg3: return "heisenberg3";
      default: return "abelian:" + std::to_string(dim());
    }
  }
  bool is_matrix_group() const { return kind_ != GroupKind::Abelian; }

  // -- algebra shortcuts

  AlgVec bracket(const AlgVec& a, const AlgVec& b) const { return alg_.bracket(a, b); }
  DualVec ad_star(const AlgVec& a, const DualVec& m) const { return alg_.ad_star(a, m); }
  /// Algebra image of the matrix commutator hat(a) hat(b) - hat(b) hat(a).
  AlgVec matrix_commutator(const AlgVec& a, const AlgVec& b) const { return -alg_.bracket(a, b); }

  // -- hat / unhat

  Eigen::MatrixXd hat(const AlgVec& xi) const {
    alg_.check(xi, "hat");
    switch (kind_) {
      case GroupKind::SO3: {
        Eigen::Matrix3d W;
        W << 0.0, xi(2), -xi(1), -xi(2), 0.0, xi(0), xi(1), -xi(0), 0.0;
        return W;
      }
      case GroupKind::Heisenberg3: {
        Eigen::Matrix3d N = Eigen::Matrix3d::Zero();
        N(1, 2) = xi(0);
        N(0, 1) = xi(1);
        N(0, 2) = xi(2);
        return N;
      }
      default: {
        // affine embedding of translations; only used to state the intertwining law
        const int n = dim();
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n + 1, n + 1);
        T.col(n).head(n) = xi.v;
        return T;
      }
    }
  }

  AlgVec unhat(const Eigen::MatrixXd& W) const {
    switch (kind_) {
      case GroupKind::SO3:
        return AlgVec{0.5 * (W(1, 2) - W(2, 1)), 0.5 * (W(2, 0) - W(0, 2)), 0.5 * (W(0, 1) - W(1, 0))};
      case GroupKind::Heisenberg3: return AlgVec{W(1, 2), W(0, 1), W(0, 2)};
      default: return AlgVec(W.col(dim()).head(dim()));
    }
  }

  // -- group law

  GroupElement identity() const {
    if (kind_ == GroupKind::Abelian) return wrap(Eigen::MatrixXd::Zero(dim(), 1));
    return wrap(Eigen::MatrixXd::Identity(3, 3));
  }

  void check(const GroupElement& g, const char* what) const {
    if (g.kind != kind_ || g.dim != dim())
      throw StructuralError(std::string(what) + ": element does not belong to group " + id());
  }

  GroupElement mul(const GroupElement& g, const GroupElement& h) const {
    check(g, "mul");
    check(h, "mul");
    if (kind_ == GroupKind::Abelian) return wrap(g.mat + h.mat);
    return normalized(wrap(g.mat * h.mat));
  }

  GroupElement inv(const GroupElement& g) const {
    check(g, "inv");
    switch (kind_) {
      case GroupKind::SO3: return wrap(g.mat.transpose());
      case GroupKind::Heisenberg3: {
        Eigen::Matrix3d N = g.mat - Eigen::Matrix3d::Identity();
        return wrap(Eigen::Matrix3d::Identity() - N + N * N);
      }
      default: return wrap(-g.mat);
    }
  }

  GroupElement exp(const AlgVec& xi) const {
    alg_.check(xi, "exp");
    switch (kind_) {
      case GroupKind::SO3: {
        // Rodrigues on K = hat(xi); K^3 = -theta^2 K
        Eigen::Matrix3d K = hat(xi);
        double t2 = xi.v.squaredNorm();
        double t = std::sqrt(t2);
        double a, b;
        if (t < 1e-4) {
          a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
          b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        } else {
          a = std::sin(t) / t;
          b = (1.0 - std::cos(t)) / t2;
        }
        return wrap(Eigen::Matrix3d::Identity() + a * K + b * K * K);
      }
      case GroupKind::Heisenberg3: {
        Eigen::Matrix3d N = hat(xi);
        return wrap(Eigen::Matrix3d::Identity() + N + 0.5 * N * N);
      }
      default: return wrap(xi.v);
    }
  }

  /// Principal logarithm; SO(3) requires rotation angle below pi - 1e-6.
  AlgVec log(const GroupElement& g) const {
    check(g, "log");
    switch (kind_) {
      case GroupKind::SO3: {
        const Eigen::Matrix3d& R = g.mat;
        Eigen::Vector3d w(R(1, 2) - R(2, 1), R(2, 0) - R(0, 2), R(0, 1) - R(1, 0));
        w *= 0.5;
        double s = w.norm();
        double c = 0.5 * (R.trace() - 1.0);
        double t = std::atan2(s, c);
        if (t > M_PI - 1e-6)
          throw DomainError("log: rotation angle " + std::to_string(t) +
                            " violates the principal-branch condition angle < pi - 1e-6");
        double f = (s < 1e-12) ? 1.0 + t * t / 6.0 : t / s;
        return AlgVec(Eigen::VectorXd(f * w));
      }
      case GroupKind::Heisenberg3: {
        Eigen::Matrix3d M = g.mat - Eigen::Matrix3d::Identity();
        return unhat(M - 0.5 * M * M);
      }
      default: return AlgVec(g.vec());
    }
  }

  // -- adjoint actions

  /// Ad_g xi = unhat(g^-1 hat(xi) g).
  AlgVec Ad(const GroupElement& g, const AlgVec& xi) const {
    check(g, "Ad");
    alg_.check(xi, "Ad");
    if (kind_ == GroupKind::Abelian) return xi;
    return unhat(inv(g).mat * hat(xi) * g.mat);
  }

  Eigen::MatrixXd Ad_matrix(const GroupElement& g) const {
    Eigen::MatrixXd A(dim(), dim());
    for (int i = 0; i < dim(); ++i) A.col(i) = Ad(g, AlgVec::unit(dim(), i)).v;
    return A;
  }

  /// Dual of Ad_{g^-1}: <Ad*_g mu, xi> = <mu, Ad_{g^-1} xi>.
  DualVec Ad_star(const GroupElement& g, const DualVec& mu) const {
    alg_.check(mu, "Ad_star");
    return DualVec(Eigen::VectorXd(Ad_matrix(inv(g)).transpose() * mu.v));
  }

  // -- constraints

  double constraint_residual(const GroupElement& g) const {
    switch (kind_) {
      case GroupKind::SO3:
        return (g.mat.transpose() * g.mat - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
      case GroupKind::Heisenberg3: {
        double r = 0.0;
        for (int i = 0; i < 3; ++i) {
          r = std::max(r, std::abs(g.mat(i, i) - 1.0));
          for (int j = 0; j < i; ++j) r = std::max(r, std::abs(g.mat(i, j)));
        }
        return r;
      }
      default: return 0.0;
    }
  }

  /// Polar re-orthonormalization once the SO(3) residual exceeds 1e-9;
  /// Heisenberg elements get their fixed entries restored exactly.
  GroupElement normalized(GroupElement g) const {
    if (kind_ == GroupKind::SO3 && constraint_residual(g) > 1e-9) {
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(Eigen::Matrix3d(g.mat), Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
      if (R.determinant() < 0) throw DomainError("element has negative determinant, not in SO(3)");
      g.mat = R;
    } else if (kind_ == GroupKind::Heisenberg3) {
      for (int i = 0; i < 3; ++i) {
        g.mat(i, i) = 1.0;
        for (int j = 0; j < i; ++j) g.mat(i, j) = 0.0;
      }
    }
    return g;
  }

  /// Validated element from user data (a 3x3 matrix, or an n-vector for R^n).
  GroupElement element(const Eigen::MatrixXd& m) const {
    if (kind_ == GroupKind::Abelian) {
      if (m.size() != dim()) throw DomainError("translation vector must have " + std::to_string(dim()) + " entries");
      return wrap(Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()));
    }
    if (m.rows() != 3 || m.cols() != 3) throw DomainError("group element must be a 3x3 matrix");
    GroupElement g = wrap(m);
    if (!m.allFinite()) throw DomainError("group element has non-finite entries");
    if (kind_ == GroupKind::SO3) {
      if (m.determinant() <= 0) throw DomainError("SO(3) element must have positive determinant");
      if (constraint_residual(g) > 1e-6) throw DomainError("matrix is not orthogonal to within 1e-6");
      return normalized(g);
    }
    if (constraint_residual(g) != 0.0) throw DomainError("Heisenberg element must be unit upper-triangular");
    return g;
  }

  // -- ambient coordinates, used by finite-difference oracles

  Eigen::VectorXd ambient(const GroupElement& g) const { return g.vec(); }

  /// Ambient image of the right-trivialized tangent a at g, i.e. hat(a) g.
  Eigen::VectorXd ambient_tangent(const GroupElement& g, const AlgVec& a) const {
    if (kind_ == GroupKind::Abelian) return a.v;
    Eigen::MatrixXd W = hat(a) * g.mat;
    return Eigen::Map<const Eigen::VectorXd>(W.data(), W.size());
  }

  /// Inverse of ambient_tangent: unhat(W g^-1).
  AlgVec trivialize_ambient(const GroupElement& g, const Eigen::VectorXd& w) const {
    if (kind_ == GroupKind::Abelian) return AlgVec(w);
    Eigen::Map<const Eigen::Matrix3d> W(w.data());
    return unhat(Eigen::Matrix3d(W) * inv(g).mat);
  }

  /// Right-trivialized covector of a matrix-valued cotangent A (pairing tr(A^T V)).
  DualVec trivialize_covector(const GroupElement& g, const Eigen::MatrixXd& A) const {
    DualVec m = DualVec::zero(dim());
    for (int i = 0; i < dim(); ++i) {
      Eigen::VectorXd t = ambient_tangent(g, AlgVec::unit(dim(), i));
      m(i) = Eigen::Map<const Eigen::VectorXd>(A.data(), A.size()).dot(t);
    }
    return m;
  }

  // -- sampling

  template <class Rng>
  AlgVec random_alg(Rng& rng, double scale = 1.0) const {
    std::normal_distribution<double> nd(0.0, scale);
    AlgVec x = AlgVec::zero(dim());
    for (int i = 0; i < dim(); ++i) x(i) = nd(rng);
    return x;
  }

  template <class Rng>
  DualVec random_dual(Rng& rng, double scale = 1.0) const {
    return DualVec(random_alg(rng, scale).v);
  }

  /// exp of a random algebra element; for SO(3) the angle stays below pi/2 + margin.
  template <class Rng>
  GroupElement random_element(Rng& rng) const {
    AlgVec a = random_alg(rng, 0.8);
    if (kind_ == GroupKind::SO3 && a.norm() > 2.5) a = a * (2.5 / a.norm());
    return exp(a);
  }

 private:
  GroupModel(GroupKind k, StructureAlgebra a) : kind_(k), alg_(std::move(a)) {}

  GroupElement wrap(Eigen::MatrixXd m) const { return GroupElement{kind_, dim(), std::move(m)}; }

  GroupKind kind_ = GroupKind::Abelian;
  StructureAlgebra alg_;
};

/// Curve through g along the right-trivialized direction a: exp(e a) g.
inline GroupElement perturb(const GroupModel& G, const GroupElement& g, const AlgVec& a, double e = 1.0) {
  return G.mul(G.exp(e * a), g);
}

/// Component i is d/de f(exp(e e_i) g) at e = 0, i.e. T*_e R_g applied to df.
template <class F>
DualVec right_gradient(const GroupModel& G, F&& f, const GroupElement& g, const FdOptions& opt = {}) {
  DualVec r = DualVec::zero(G.dim());
  for (int i = 0; i < G.dim(); ++i) {
    AlgVec e = AlgVec::unit(G.dim(), i);
    r(i) = central_derivative([&](double t) { return f(perturb(G, g, e, t)); }, opt);
  }
  return r;
}

}  // namespace gmtk

#endif  // GMTK_GROUP_HPP
