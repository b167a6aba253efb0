#ifndef GMTK_INTEGRATE_HPP
#define GMTK_INTEGRATE_HPP

#include <Eigen/Dense>

#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "reduction.hpp"

namespace gmtk {

enum class Method { lie_euler, rkmk4, rk4_linear };

inline Method method_from_name(const std::string& s) {
  if (s == "lie_euler") return Method::lie_euler;
  if (s == "rkmk4") return Method::rkmk4;
  if (s == "rk4_linear") return Method::rk4_linear;
  throw StructuralError("unknown integrator '" + s + "' (expected lie_euler, rkmk4 or rk4_linear)");
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::lie_euler: return "lie_euler";
    case Method::rkmk4: return "rkmk4";
    default: return "rk4_linear";
  }
}

struct IntegratorSpec {
  Method method = Method::rkmk4;
  double dt = 1e-3;
  int steps = 1000;
  int stride = 1;  ///< keep every stride-th state (the last state is always kept)

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw StructuralError("integrator dt must be positive");
    if (steps < 1) throw StructuralError("integrator steps must be at least 1");
    if (stride < 1) throw StructuralError("integrator stride must be at least 1");
  }
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<GroupElement> groups;    ///< empty for reduced integrators
  std::vector<Eigen::VectorXd> fibers; ///< mu or xi
  std::string fiber_label;             ///< "mu" or "xi"
  std::vector<double> energy;
  std::vector<std::vector<double>> casimirs;
  std::vector<double> constraint_residual;
  std::map<std::string, std::vector<double>> extra;  ///< method-specific diagnostics
  bool failed = false;
  std::string error;

  std::size_t size() const { return times.size(); }
};

namespace detail {

/// Right-hand side on G x V: trivialized group velocity and linear velocity.
struct Rate {
  AlgVec a;
  Eigen::VectorXd b;
};

using RateFn = std::function<Rate(const std::optional<GroupElement>&, const Eigen::VectorXd&)>;

/// One step of the chosen method on G x V. With no group part only the linear
/// stages remain, so the reduced integrators share the stage arithmetic exactly.
inline void step(const GroupModel& G, Method m, double dt, const RateFn& f, std::optional<GroupElement>& g,
                 Eigen::VectorXd& y) {
  auto moved = [&](const AlgVec& u) -> std::optional<GroupElement> {
    if (!g) return std::nullopt;
    return G.mul(G.exp(u), *g);
  };
  if (m == Method::lie_euler) {
    Rate k = f(g, y);
    if (g) g = moved(dt * k.a);
    y = y + dt * k.b;
    return;
  }
  if (m == Method::rk4_linear && g && G.is_matrix_group()) {
    // classical RK4 on the ambient matrix ODE gdot = hat(k) g, then re-projection
    auto vel = [&](const GroupElement& h, const Eigen::VectorXd& x, Rate& k) -> Eigen::MatrixXd {
      k = f(h, x);
      return G.hat(k.a) * h.mat;
    };
    auto at = [&](const Eigen::MatrixXd& M) { return GroupElement{g->kind, g->dim, M}; };
    Rate k1, k2, k3, k4;
    Eigen::MatrixXd M0 = g->mat;
    Eigen::MatrixXd V1 = vel(*g, y, k1);
    Eigen::MatrixXd V2 = vel(at(M0 + 0.5 * dt * V1), y + 0.5 * dt * k1.b, k2);
    Eigen::MatrixXd V3 = vel(at(M0 + 0.5 * dt * V2), y + 0.5 * dt * k2.b, k3);
    Eigen::MatrixXd V4 = vel(at(M0 + dt * V3), y + dt * k3.b, k4);
    g = G.normalized(at(M0 + dt / 6.0 * (V1 + 2.0 * V2 + 2.0 * V3 + V4)));
    y = y + dt / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    return;
  }
  // Munthe-Kaas RK4 with the commutator corrections; on R^n it is classical RK4
  // no group part: the group stages are empty and skipped
  auto comm = [&](const AlgVec& u, const AlgVec& v) { return g ? G.matrix_commutator(u, v) : u; };
  Rate k1 = f(g, y);
  AlgVec A1 = dt * k1.a;
  Eigen::VectorXd B1 = dt * k1.b;
  Rate k2 = f(moved(0.5 * A1), y + 0.5 * B1);
  AlgVec A2 = dt * k2.a;
  Eigen::VectorXd B2 = dt * k2.b;
  Rate k3 = f(moved(0.5 * A2 - comm(A1, A2) / 8.0), y + 0.5 * B2);
  AlgVec A3 = dt * k3.a;
  Eigen::VectorXd B3 = dt * k3.b;
  Rate k4 = f(moved(A3), y + B3);
  AlgVec A4 = dt * k4.a;
  Eigen::VectorXd B4 = dt * k4.b;
  if (g) g = moved((A1 + 2.0 * A2 + 2.0 * A3 + A4) / 6.0 - comm(A1, A4) / 12.0);
  y = y + (B1 + 2.0 * B2 + 2.0 * B3 + B4) / 6.0;
}

struct Diag {
  double energy = 0.0;
  std::vector<double> casimirs;
  double constraint = 0.0;
  std::vector<std::pair<std::string, double>> extra;
};

using DiagFn = std::function<Diag(const std::optional<GroupElement>&, const Eigen::VectorXd&)>;

inline TrajectoryRecord run(const GroupModel& G, const IntegratorSpec& spec, std::string label,
                            std::optional<GroupElement> g, Eigen::VectorXd y, const RateFn& f, const DiagFn& diag) {
  spec.validate();
  TrajectoryRecord rec;
  rec.fiber_label = std::move(label);
  auto record = [&](int n) {
    Diag d = diag(g, y);
    rec.times.push_back(n * spec.dt);
    if (g) rec.groups.push_back(*g);
    rec.fibers.push_back(y);
    rec.energy.push_back(d.energy);
    rec.casimirs.push_back(d.casimirs);
    rec.constraint_residual.push_back(d.constraint);
    for (auto& [k, v] : d.extra) rec.extra[k].push_back(v);
  };
  try {
    record(0);
    for (int n = 1; n <= spec.steps; ++n) {
      step(G, spec.method, spec.dt, f, g, y);
      if (!y.allFinite() || (g && !g->mat.allFinite())) throw EvaluationError("state became non-finite at step " + std::to_string(n));
      if (n % spec.stride == 0 || n == spec.steps) record(n);
    }
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace detail

inline TrajectoryRecord integrate_hamilton(const HamiltonianField& H, const PhaseState& s0, const IntegratorSpec& spec) {
  const GroupModel& G = H.model;
  auto f = [&H](const std::optional<GroupElement>& g, const Eigen::VectorXd& y) {
    HamiltonVelocity v = hamilton_vector_field(H, {*g, DualVec(y)});
    return detail::Rate{v.gdot, v.mudot.v};
  };
  auto diag = [&H, &G](const std::optional<GroupElement>& g, const Eigen::VectorXd& y) {
    detail::Diag d;
    DualVec mu(y);
    d.energy = H.value(*g, mu);
    d.casimirs = orbit_invariants(G, mu);
    d.constraint = G.constraint_residual(*g);
    HamiltonVelocity v = hamilton_vector_field(H, {*g, mu});
    d.extra.push_back({"sprime_residual", membership_Sprime(H, from_velocity(G, *g, mu, v.gdot, v.mudot))});
    return d;
  };
  return detail::run(G, spec, "mu", s0.g, s0.mu.v, f, diag);
}

inline TrajectoryRecord integrate_lie_poisson(const HamiltonianField& h, const DualVec& mu0, const IntegratorSpec& spec) {
  if (!h.reduced) throw StructuralError("integrate_lie_poisson needs a reduced Hamiltonian");
  const GroupModel& G = h.model;
  const GroupElement e = G.identity();
  auto f = [&h](const std::optional<GroupElement>&, const Eigen::VectorXd& y) {
    return detail::Rate{AlgVec(), lie_poisson_vf(h, DualVec(y)).v};
  };
  auto diag = [&h, &G, e](const std::optional<GroupElement>&, const Eigen::VectorXd& y) {
    detail::Diag d;
    d.energy = h.value(e, DualVec(y));
    d.casimirs = orbit_invariants(G, DualVec(y));
    return d;
  };
  return detail::run(G, spec, "mu", std::nullopt, mu0.v, f, diag);
}

inline TrajectoryRecord integrate_euler_poincare(const LagrangianField& l, const AlgVec& xi0, const IntegratorSpec& spec) {
  if (!l.reduced) throw StructuralError("integrate_euler_poincare needs a reduced Lagrangian");
  const GroupModel& G = l.model;
  const GroupElement e = G.identity();
  // surfaces DegenerateLagrangian before the run starts
  (void)euler_poincare_vf(l, xi0);
  auto f = [&l](const std::optional<GroupElement>&, const Eigen::VectorXd& y) {
    return detail::Rate{AlgVec(), euler_poincare_vf(l, AlgVec(y)).v};
  };
  auto diag = [&l, &G, e](const std::optional<GroupElement>&, const Eigen::VectorXd& y) {
    detail::Diag d;
    d.energy = lagrangian_energy(l, e, AlgVec(y));
    d.casimirs = orbit_invariants(G, l.d_fiber(e, AlgVec(y)));
    return d;
  };
  return detail::run(G, spec, "xi", std::nullopt, xi0.v, f, diag);
}

inline TrajectoryRecord integrate_trivialized_el(const LagrangianField& L, const GroupElement& g0, const AlgVec& xi0,
                                                 const IntegratorSpec& spec) {
  const GroupModel& G = L.model;
  (void)el_vector_field(L, g0, xi0);
  auto f = [&L](const std::optional<GroupElement>& g, const Eigen::VectorXd& y) {
    ELVelocity v = el_vector_field(L, *g, AlgVec(y));
    return detail::Rate{v.gdot, v.xidot.v};
  };
  auto diag = [&L, &G](const std::optional<GroupElement>& g, const Eigen::VectorXd& y) {
    detail::Diag d;
    AlgVec xi(y);
    d.energy = lagrangian_energy(L, *g, xi);
    d.casimirs = orbit_invariants(G, L.d_fiber(*g, xi));
    d.constraint = G.constraint_residual(*g);
    ELVelocity v = el_vector_field(L, *g, xi);
    d.extra.push_back({"el_residual", el_residual(L, *g, xi, v.xidot).max_abs()});
    d.extra.push_back({"hessian_condition", v.condition});
    return d;
  };
  return detail::run(G, spec, "xi", g0, xi0.v, f, diag);
}

/// Largest |x_i - y_i| over the shared fiber samples of two records.
inline double sup_fiber_error(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  double e = 0.0;
  std::size_t n = std::min(a.fibers.size(), b.fibers.size());
  for (std::size_t i = 0; i < n; ++i) e = std::max(e, (a.fibers[i] - b.fibers[i]).cwiseAbs().maxCoeff());
  return e;
}

/// Largest drift of a diagnostic series from its initial value, relative if requested.
inline double drift(const std::vector<double>& v, bool relative = false) {
  double d = 0.0;
  for (double x : v) d = std::max(d, std::abs(x - v.front()));
  if (relative && v.front() != 0.0) d /= std::abs(v.front());
  return d;
}

// -- CSV

inline std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Header: t, group columns (g00..g22 or q1..qn), fiber columns, energy,
/// casimir columns, constraint_residual. 17 significant digits.
inline void write_csv(std::ostream& os, const GroupModel& G, const TrajectoryRecord& r) {
  const int n = G.dim();
  os << "t";
  if (!r.groups.empty()) {
    if (G.is_matrix_group()) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",g" << i << j;
    } else {
      for (int i = 1; i <= n; ++i) os << ",q" << i;
    }
  }
  for (int i = 1; i <= n; ++i) os << "," << r.fiber_label << i;
  os << ",energy";
  std::size_t nc = r.casimirs.empty() ? 0 : r.casimirs.front().size();
  for (std::size_t i = 1; i <= nc; ++i) os << ",casimir" << i;
  os << ",constraint_residual\n";
  for (std::size_t k = 0; k < r.size(); ++k) {
    os << format17(r.times[k]);
    if (!r.groups.empty()) {
      const Eigen::MatrixXd& M = r.groups[k].mat;
      if (G.is_matrix_group()) {
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) os << "," << format17(M(i, j));
      } else {
        for (int i = 0; i < n; ++i) os << "," << format17(M(i, 0));
      }
    }
    for (int i = 0; i < n; ++i) os << "," << format17(r.fibers[k](i));
    os << "," << format17(r.energy[k]);
    for (double c : r.casimirs[k]) os << "," << format17(c);
    os << "," << format17(r.constraint_residual[k]) << "\n";
  }
}

}  // namespace gmtk

#endif  // GMTK_INTEGRATE_HPP
