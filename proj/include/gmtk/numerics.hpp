#ifndef GMTK_NUMERICS_HPP
#define GMTK_NUMERICS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "errors.hpp"

namespace gmtk {

/// Default central-difference step; GMTK_FD_STEP overrides it process-wide.
inline double fd_step() {
  static const double h = [] {
    if (const char* s = std::getenv("GMTK_FD_STEP")) {
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end != s && std::isfinite(v) && v > 0.0) return v;
    }
    return 1e-5;
  }();
  return h;
}

/// Message describing an unusable GMTK_FD_STEP, empty when unset or valid.
inline std::string fd_step_env_problem() {
  const char* s = std::getenv("GMTK_FD_STEP");
  if (!s) return {};
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !std::isfinite(v) || !(v > 0.0))
    return std::string("GMTK_FD_STEP: expected a positive number, got '") + s + "'";
  return {};
}

struct FdOptions {
  double step = fd_step();
  bool richardson = false;  ///< combine steps h and h/2 to cancel the h^2 term
};

inline double check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string("non-finite value in ") + what);
  return v;
}

inline const Eigen::VectorXd& check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw EvaluationError(std::string("non-finite value in ") + what);
  return v;
}

/// d/de f(e) at e = 0 by central differences.
template <class F>
double central_derivative(F&& f, const FdOptions& opt = {}) {
  auto d = [&](double h) { return (f(h) - f(-h)) / (2.0 * h); };
  double h = opt.step;
  double r = d(h);
  if (opt.richardson) r = (4.0 * d(0.5 * h) - r) / 3.0;
  return check_finite(r, "finite difference");
}

/// Same for vector-valued f.
template <class F>
Eigen::VectorXd central_derivative_vec(F&& f, const FdOptions& opt = {}) {
  auto d = [&](double h) -> Eigen::VectorXd { return (f(h) - f(-h)) / (2.0 * h); };
  double h = opt.step;
  Eigen::VectorXd r = d(h);
  if (opt.richardson) r = (4.0 * d(0.5 * h) - r) / 3.0;
  return check_finite(r, "finite difference");
}

/// Gradient of a scalar function of a vector.
template <class F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, const FdOptions& opt = {}) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    g(i) = central_derivative(
        [&](double e) {
          Eigen::VectorXd y = x;
          y(i) += e;
          return f(y);
        },
        opt);
  }
  return g;
}

/// Jacobian of a vector function; column j is the derivative along x_j.
template <class F>
Eigen::MatrixXd fd_jacobian(F&& f, const Eigen::VectorXd& x, const FdOptions& opt = {}) {
  Eigen::MatrixXd J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd col = central_derivative_vec(
        [&](double e) -> Eigen::VectorXd {
          Eigen::VectorXd y = x;
          y(j) += e;
          return f(y);
        },
        opt);
    if (j == 0) J.resize(col.size(), x.size());
    J.col(j) = col;
  }
  return J;
}

struct RankInfo {
  int rank = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double condition = std::numeric_limits<double>::infinity();
};

/// Numerical rank with threshold rel * sigma_max.
inline RankInfo numerical_rank(const Eigen::MatrixXd& A, double rel = 1e-8) {
  RankInfo info;
  if (A.size() == 0) return info;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  info.sigma_max = s(0);
  info.sigma_min = s(s.size() - 1);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * info.sigma_max && s(i) > 0.0) ++info.rank;
  if (info.sigma_min > 0.0) info.condition = info.sigma_max / info.sigma_min;
  return info;
}

/// Solves a square system, throwing DegenerateLagrangian when rank deficient.
inline Eigen::VectorXd solve_nondegenerate(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                           double* condition = nullptr) {
  RankInfo info = numerical_rank(A);
  if (condition) *condition = info.condition;
  if (info.rank < A.rows()) throw DegenerateLagrangian(info.rank, int(A.rows()), info.condition);
  return A.partialPivLu().solve(b);
}

}  // namespace gmtk

#endif  // GMTK_NUMERICS_HPP
