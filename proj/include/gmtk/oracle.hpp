#ifndef GMTK_ORACLE_HPP
#define GMTK_ORACLE_HPP

#include <Eigen/Dense>

#include <functional>

#include "group.hpp"
#include "numerics.hpp"
#include "triplet.hpp"

namespace gmtk {

/// Finite-difference tools on product manifolds G x R^m, independent of the
/// closed-form formulas they are used to check. Points carry a group element
/// and a flat vector; tangents carry a right-trivialized group part.
namespace oracle {

struct Point {
  GroupElement g;
  Eigen::VectorXd x;
};

struct Tangent {
  AlgVec a;
  Eigen::VectorXd b;
};

using Field = std::function<Tangent(const Point&)>;
using OneForm = std::function<double(const Point&, const Tangent&)>;
using Scalar = std::function<double(const Point&)>;

/// Straight-line curve through p tangent to t.
inline Point along(const GroupModel& G, const Point& p, const Tangent& t, double e) {
  return {perturb(G, p.g, t.a, e), p.x + e * t.b};
}

inline Eigen::VectorXd ambient(const GroupModel& G, const Point& p, const Tangent& t) {
  Eigen::VectorXd ga = G.ambient_tangent(p.g, t.a);
  Eigen::VectorXd r(ga.size() + t.b.size());
  r << ga, t.b;
  return r;
}

inline Tangent from_ambient(const GroupModel& G, const Point& p, const Eigen::VectorXd& w) {
  Eigen::Index m = p.x.size();
  Eigen::Index k = w.size() - m;
  return {G.trivialize_ambient(p.g, w.head(k)), w.tail(m)};
}

/// Directional derivative of a scalar along t at p.
inline double directional(const GroupModel& G, const Scalar& f, const Point& p, const Tangent& t,
                          const FdOptions& opt = {}) {
  return central_derivative([&](double e) { return f(along(G, p, t, e)); }, opt);
}

/// Derivative of a vector-valued map along t at p.
template <class F>
Eigen::VectorXd directional_vec(const GroupModel& G, F&& f, const Point& p, const Tangent& t,
                                const FdOptions& opt = {}) {
  return central_derivative_vec([&](double e) -> Eigen::VectorXd { return f(along(G, p, t, e)); }, opt);
}

/// Pushforward of t under a map between product manifolds over groups G and H.
template <class F>
Tangent pushforward(const GroupModel& G, const GroupModel& H, F&& map, const Point& p, const Tangent& t,
                    const FdOptions& opt = {}) {
  Point q = map(p);
  Eigen::VectorXd w = central_derivative_vec(
      [&](double e) -> Eigen::VectorXd {
        Point r = map(along(G, p, t, e));
        Eigen::VectorXd v(H.ambient(r.g).size() + r.x.size());
        v << H.ambient(r.g), r.x;
        return v;
      },
      opt);
  return from_ambient(H, q, w);
}

/// Jacobi-Lie bracket [X, Y] = DY.X - DX.Y computed in ambient coordinates.
inline Tangent lie_bracket(const GroupModel& G, const Field& X, const Field& Y, const Point& p,
                           const FdOptions& opt = {}) {
  Tangent xp = X(p), yp = Y(p);
  auto amb_along = [&](const Field& V, const Tangent& dir) {
    return central_derivative_vec(
        [&](double e) -> Eigen::VectorXd {
          Point q = along(G, p, dir, e);
          return ambient(G, q, V(q));
        },
        opt);
  };
  Eigen::VectorXd w = amb_along(Y, xp) - amb_along(X, yp);
  return from_ambient(G, p, w);
}

/// d(theta)(X, Y) = X theta(Y) - Y theta(X) - theta([X, Y]).
inline double exterior_derivative(const GroupModel& G, const OneForm& theta, const Field& X, const Field& Y,
                                  const Point& p, const FdOptions& opt = {}) {
  double xty = directional(G, [&](const Point& q) { return theta(q, Y(q)); }, p, X(p), opt);
  double ytx = directional(G, [&](const Point& q) { return theta(q, X(q)); }, p, Y(p), opt);
  return xty - ytx - theta(p, lie_bracket(G, X, Y, p, opt));
}

/// Bracket of vector fields on a plain vector space, DY.X - DX.Y.
template <class F1, class F2>
Eigen::VectorXd vector_bracket(F1&& X, F2&& Y, const Eigen::VectorXd& z, const FdOptions& opt = {}) {
  Eigen::VectorXd xz = X(z), yz = Y(z);
  Eigen::VectorXd dyx = central_derivative_vec([&](double e) -> Eigen::VectorXd { return Y(Eigen::VectorXd(z + e * xz)); }, opt);
  Eigen::VectorXd dxy = central_derivative_vec([&](double e) -> Eigen::VectorXd { return X(Eigen::VectorXd(z + e * yz)); }, opt);
  return dyx - dxy;
}

// -- TT*G as G x (g* x g x g*)

inline Point to_point(const TripletPoint& p) {
  const int n = p.mu.size();
  Eigen::VectorXd x(3 * n);
  x << p.mu.v, p.xi.v, p.nu.v;
  return {p.g, x};
}

inline TripletPoint to_triplet(const Point& q) {
  const Eigen::Index n = q.x.size() / 3;
  return {q.g, DualVec(q.x.segment(0, n)), AlgVec(q.x.segment(n, n)), DualVec(q.x.segment(2 * n, n))};
}

inline Tangent to_tangent(const TripletTangent& t) {
  const int n = t.d_mu.size();
  Eigen::VectorXd b(3 * n);
  b << t.d_mu.v, t.d_xi.v, t.d_nu.v;
  return {t.d_g, b};
}

inline TripletTangent to_triplet_tangent(const TripletPoint& base, const Tangent& t) {
  const Eigen::Index n = t.b.size() / 3;
  return {base, t.a, DualVec(t.b.segment(0, n)), AlgVec(t.b.segment(n, n)), DualVec(t.b.segment(2 * n, n))};
}

/// Right invariant vector field of a constant generator, as an oracle field.
inline Field triplet_field(const GroupModel& G, const Generator& k) {
  return [G, k](const Point& q) { return to_tangent(right_invariant_vf(G, k, to_triplet(q))); };
}

/// A generator-valued one-form on TT*G, seen as a one-form on the product manifold.
template <class Theta>
OneForm triplet_form(const GroupModel& G, Theta theta) {
  return [G, theta](const Point& q, const Tangent& t) {
    TripletPoint p = to_triplet(q);
    return theta(p, tangent_to_generator(G, p, to_triplet_tangent(p, t)));
  };
}

}  // namespace oracle
}  // namespace gmtk

#endif  // GMTK_ORACLE_HPP
