#ifndef GMTK_ALGEBRA_HPP
#define GMTK_ALGEBRA_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"

namespace gmtk {

/// Coordinate vector tagged with the space it lives in, so that algebra
/// elements and dual elements cannot be mixed up silently.
template <class Tag>
struct Coords {
  Eigen::VectorXd v;

  Coords() = default;
  explicit Coords(Eigen::VectorXd x) : v(std::move(x)) {}
  Coords(std::initializer_list<double> xs) : v(Eigen::Index(xs.size())) {
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
  }

  static Coords zero(int n) { return Coords(Eigen::VectorXd::Zero(n)); }
  static Coords unit(int n, int i) { return Coords(Eigen::VectorXd::Unit(n, i)); }

  int size() const { return int(v.size()); }
  double operator()(int i) const { return v(i); }
  double& operator()(int i) { return v(i); }
  double norm() const { return v.norm(); }
  double max_abs() const { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

  Coords& operator+=(const Coords& o) { v += o.v; return *this; }
  Coords& operator-=(const Coords& o) { v -= o.v; return *this; }
  Coords& operator*=(double s) { v *= s; return *this; }
  friend Coords operator+(Coords a, const Coords& b) { return a += b; }
  friend Coords operator-(Coords a, const Coords& b) { return a -= b; }
  friend Coords operator-(Coords a) { a.v = -a.v; return a; }
  friend Coords operator*(double s, Coords a) { return a *= s; }
  friend Coords operator*(Coords a, double s) { return a *= s; }
  friend Coords operator/(Coords a, double s) { a.v /= s; return a; }
};

struct AlgTag {};
struct DualTag {};
using AlgVec = Coords<AlgTag>;    ///< element of the Lie algebra
using DualVec = Coords<DualTag>;  ///< element of its dual

/// Lie algebra given by dense structure constants [e_i, e_j] = sum_k c[i][j][k] e_k.
class StructureAlgebra {
 public:
  StructureAlgebra() = default;

  /// Takes the dense array as is (index i*n*n + j*n + k); no symmetrization.
  StructureAlgebra(std::string name, int dim, std::vector<double> dense)
      : name_(std::move(name)), dim_(dim), c_(std::move(dense)) {
    if (dim_ <= 0) throw StructuralError("algebra dimension must be positive");
    if (c_.size() != std::size_t(dim_) * dim_ * dim_)
      throw StructuralError("structure constant array has wrong size");
  }

  /// Builds from the nonzero entries; missing antisymmetric partners are filled in.
  static StructureAlgebra from_entries(std::string name, int dim,
                                       const std::vector<std::tuple<int, int, int, double>>& nz) {
    if (dim <= 0) throw StructuralError("algebra dimension must be positive");
    std::vector<double> c(std::size_t(dim) * dim * dim, 0.0);
    std::vector<char> set(c.size(), 0);
    auto at = [dim](int i, int j, int k) { return (std::size_t(i) * dim + j) * dim + k; };
    for (auto [i, j, k, val] : nz) {
      if (i < 0 || j < 0 || k < 0 || i >= dim || j >= dim || k >= dim)
        throw StructuralError("structure constant index out of range");
      c[at(i, j, k)] = val;
      set[at(i, j, k)] = 1;
    }
    for (auto [i, j, k, val] : nz)
      if (!set[at(j, i, k)]) c[at(j, i, k)] = -val;
    return StructureAlgebra(std::move(name), dim, std::move(c));
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double c(int i, int j, int k) const { return c_[(std::size_t(i) * dim_ + j) * dim_ + k]; }
  bool is_abelian() const {
    return std::all_of(c_.begin(), c_.end(), [](double x) { return x == 0.0; });
  }

  template <class T>
  void check(const Coords<T>& x, const char* what) const {
    if (x.size() != dim_)
      throw StructuralError(std::string(what) + ": expected dimension " + std::to_string(dim_) +
                            ", got " + std::to_string(x.size()));
  }

  AlgVec bracket(const AlgVec& xi, const AlgVec& eta) const {
    check(xi, "bracket");
    check(eta, "bracket");
    AlgVec r = AlgVec::zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (xi(i) == 0.0) continue;
      for (int j = 0; j < dim_; ++j) {
        double w = xi(i) * eta(j);
        if (w == 0.0) continue;
        for (int k = 0; k < dim_; ++k) r(k) += w * c(i, j, k);
      }
    }
    return r;
  }

  /// nu_j = sum_{i,k} xi_i c[i][j][k] mu_k, i.e. <ad*_xi mu, eta> = <mu, [xi, eta]>.
  DualVec ad_star(const AlgVec& xi, const DualVec& mu) const {
    check(xi, "ad_star");
    check(mu, "ad_star");
    DualVec r = DualVec::zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (xi(i) == 0.0) continue;
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) r(j) += xi(i) * c(i, j, k) * mu(k);
    }
#ifdef GMTK_INJECT_AD_STAR_SIGN_FLIP
    r = -r;
#endif
    return r;
  }

  /// Matrix of eta -> ad*_eta mu (columns indexed by eta's basis).
  Eigen::MatrixXd ad_star_in_eta(const DualVec& mu) const {
    Eigen::MatrixXd M(dim_, dim_);
    for (int i = 0; i < dim_; ++i) M.col(i) = ad_star(AlgVec::unit(dim_, i), mu).v;
    return M;
  }

 private:
  std::string name_;
  int dim_ = 0;
  std::vector<double> c_;
};

inline double pair(const DualVec& mu, const AlgVec& xi) {
  if (mu.size() != xi.size())
    throw StructuralError("pair: dimension mismatch " + std::to_string(mu.size()) + " vs " +
                          std::to_string(xi.size()));
  return mu.v.dot(xi.v);
}

struct AlgebraReport {
  double antisymmetry = 0.0;  ///< max |c[i][j][k] + c[j][i][k]|
  double jacobi = 0.0;        ///< max cyclic sum over all index quadruples
  bool pass = false;
};

inline AlgebraReport validate(const StructureAlgebra& A, double tol = 1e-12) {
  AlgebraReport r;
  const int n = A.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        r.antisymmetry = std::max(r.antisymmetry, std::abs(A.c(i, j, k) + A.c(j, i, k)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m)
            s += A.c(i, j, m) * A.c(m, k, l) + A.c(j, k, m) * A.c(m, i, l) +
                 A.c(k, i, m) * A.c(m, j, l);
          r.jacobi = std::max(r.jacobi, std::abs(s));
        }
  r.pass = r.antisymmetry <= tol && r.jacobi <= tol;
  return r;
}

/// so(3) with c[i][j][k] = epsilon_ijk.
inline StructureAlgebra so3_algebra() {
  return StructureAlgebra::from_entries("so3", 3, {{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {2, 0, 1, 1.0}});
}

/// Heisenberg algebra, [e1, e2] = e3.
inline StructureAlgebra heisenberg3_algebra() {
  return StructureAlgebra::from_entries("heisenberg3", 3, {{0, 1, 2, 1.0}});
}

inline StructureAlgebra abelian_algebra(int n) {
  return StructureAlgebra::from_entries("abelian:" + std::to_string(n), n, {});
}

}  // namespace gmtk

#endif  // GMTK_ALGEBRA_HPP
