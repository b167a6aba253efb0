#ifndef GMTK_SYSTEMS_HPP
#define GMTK_SYSTEMS_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "fields.hpp"
#include "group.hpp"
#include "legendre.hpp"

namespace gmtk {

struct SystemParams {
  Eigen::VectorXd inertia;       ///< diagonal of the kinetic quadratic form
  double potential_c = 0.0;      ///< potential coefficient
  int dim = 0;                   ///< algebra dimension
  Eigen::VectorXd linear_coeff;  ///< a in l = a.xi for the degenerate system
  Eigen::MatrixXd kinetic;       ///< full kinetic matrix (diagonal of inertia unless configured)
};

struct InitialState {
  GroupElement g;
  std::optional<DualVec> mu;
  std::optional<AlgVec> xi;
};

struct SystemSpec {
  std::string name;
  GroupModel model;
  std::optional<LagrangianField> lagrangian;
  std::optional<HamiltonianField> hamiltonian;
  SystemParams params;
  InitialState initial;
};

namespace detail {

inline LagrangianField quadratic_lagrangian(const GroupModel& G, const Eigen::VectorXd& I) {
  return reduced_lagrangian(
      G, [I](const AlgVec& x) { return 0.5 * x.v.dot(I.cwiseProduct(x.v)); },
      [I](const AlgVec& x) { return DualVec(Eigen::VectorXd(I.cwiseProduct(x.v))); },
      [I](const AlgVec&) { return Eigen::MatrixXd(I.asDiagonal()); });
}

inline HamiltonianField quadratic_hamiltonian(const GroupModel& G, const Eigen::VectorXd& I) {
  Eigen::VectorXd Ii = I.cwiseInverse();
  return reduced_hamiltonian(
      G, [Ii](const DualVec& m) { return 0.5 * m.v.dot(Ii.cwiseProduct(m.v)); },
      [Ii](const DualVec& m) { return AlgVec(Eigen::VectorXd(Ii.cwiseProduct(m.v))); },
      [Ii](const DualVec&) { return Eigen::MatrixXd(Ii.asDiagonal()); });
}

/// Height potential c (g e3).e3 on SO(3) and c |q|^2 / 2 on R^n, with right gradients.
inline double potential(const GroupModel& G, double c, const GroupElement& g) {
  if (G.kind() == GroupKind::SO3) return c * g.mat(2, 2);
  return 0.5 * c * g.mat.squaredNorm();
}

inline DualVec potential_gradient(const GroupModel& G, double c, const GroupElement& g) {
  DualVec r = DualVec::zero(G.dim());
  if (G.kind() == GroupKind::SO3) {
    for (int i = 0; i < 3; ++i) r(i) = c * (G.hat(AlgVec::unit(3, i)) * g.mat)(2, 2);
  } else {
    r = DualVec(Eigen::VectorXd(c * g.vec()));
  }
  return r;
}

/// Kinetic form plus potential; reduced when c == 0.
inline std::pair<LagrangianField, HamiltonianField> mechanical_pair(const GroupModel& G, const Eigen::VectorXd& I,
                                                                    double c) {
  LagrangianField L = quadratic_lagrangian(G, I);
  HamiltonianField H = quadratic_hamiltonian(G, I);
  if (c == 0.0) return {L, H};
  L.reduced = H.reduced = false;
  L.eval = [G, I, c](const GroupElement& g, const AlgVec& x) {
    return 0.5 * x.v.dot(I.cwiseProduct(x.v)) - potential(G, c, g);
  };
  L.group_grad = [G, c](const GroupElement& g, const AlgVec&) { return -potential_gradient(G, c, g); };
  Eigen::VectorXd Ii = I.cwiseInverse();
  H.eval = [G, Ii, c](const GroupElement& g, const DualVec& m) {
    return 0.5 * m.v.dot(Ii.cwiseProduct(m.v)) + potential(G, c, g);
  };
  H.group_grad = [G, c](const GroupElement& g, const DualVec&) { return potential_gradient(G, c, g); };
  return {L, H};
}

/// Same pair for a full symmetric positive definite kinetic matrix M.
inline std::pair<LagrangianField, HamiltonianField> mechanical_pair_form(const GroupModel& G, const Eigen::MatrixXd& M,
                                                                         double c) {
  const Eigen::MatrixXd Mi = M.inverse();
  auto kin = [](const Eigen::MatrixXd& A, const Eigen::VectorXd& v) { return 0.5 * v.dot(A * v); };
  LagrangianField L = reduced_lagrangian(
      G, [M, kin](const AlgVec& x) { return kin(M, x.v); },
      [M](const AlgVec& x) { return DualVec(Eigen::VectorXd(M * x.v)); }, [M](const AlgVec&) { return M; });
  HamiltonianField H = reduced_hamiltonian(
      G, [Mi, kin](const DualVec& m) { return kin(Mi, m.v); },
      [Mi](const DualVec& m) { return AlgVec(Eigen::VectorXd(Mi * m.v)); }, [Mi](const DualVec&) { return Mi; });
  if (c == 0.0) return {L, H};
  L.reduced = H.reduced = false;
  L.eval = [G, M, c, kin](const GroupElement& g, const AlgVec& x) { return kin(M, x.v) - potential(G, c, g); };
  L.group_grad = [G, c](const GroupElement& g, const AlgVec&) { return -potential_gradient(G, c, g); };
  H.eval = [G, Mi, c, kin](const GroupElement& g, const DualVec& m) { return kin(Mi, m.v) + potential(G, c, g); };
  H.group_grad = [G, c](const GroupElement& g, const DualVec&) { return potential_gradient(G, c, g); };
  return {L, H};
}

inline LagrangianField linear_lagrangian(const GroupModel& G, const Eigen::VectorXd& a) {
  const int n = G.dim();
  return reduced_lagrangian(
      G, [a](const AlgVec& x) { return a.dot(x.v); }, [a](const AlgVec&) { return DualVec(a); },
      [n](const AlgVec&) { return Eigen::MatrixXd(Eigen::MatrixXd::Zero(n, n)); });
}

inline void fill_initial(SystemSpec& s) {
  if (!s.lagrangian || !s.initial.mu || s.initial.xi) return;
  // xi from mu through the kinetic form when it is diagonal and known
  if (s.params.kinetic.rows() == s.model.dim())
    s.initial.xi = AlgVec(Eigen::VectorXd(s.params.kinetic.llt().solve(s.initial.mu->v)));
  else if (s.params.inertia.size() == s.model.dim())
    s.initial.xi = AlgVec(Eigen::VectorXd(s.initial.mu->v.cwiseQuotient(s.params.inertia)));
}

}  // namespace detail

/// Shipped systems. Default parameters are artifact choices.
inline SystemSpec builtin(const std::string& name) {
  SystemSpec s;
  s.name = name;
  if (name == "free_rigid_body" || name == "rigid_body_potential") {
    s.model = GroupModel::so3();
    s.params.dim = 3;
    s.params.inertia = Eigen::Vector3d(1.0, 2.0, 3.0);
    s.params.potential_c = name == "free_rigid_body" ? 0.0 : 1.0;
    auto [L, H] = detail::mechanical_pair(s.model, s.params.inertia, s.params.potential_c);
    s.lagrangian = L;
    s.hamiltonian = H;
    if (name == "free_rigid_body") {
      s.initial.g = s.model.identity();
      s.initial.mu = DualVec{1.0, 1.0, 1.0};
    } else {
      s.initial.g = s.model.exp(AlgVec{0.4, 0.1, 0.0});
      s.initial.mu = DualVec{1.0, 1.0, 0.6};
    }
  } else if (name == "abelian_particle") {
    s.model = GroupModel::abelian(3);
    s.params.dim = 3;
    s.params.inertia = Eigen::Vector3d::Ones();
    s.params.potential_c = 1.0;
    auto [L, H] = detail::mechanical_pair(s.model, s.params.inertia, s.params.potential_c);
    s.lagrangian = L;
    s.hamiltonian = H;
    s.initial.g = s.model.element(Eigen::Vector3d(1.0, 0.0, 0.5));
    s.initial.mu = DualVec{0.0, 1.0, 0.2};
  } else if (name == "heisenberg_free") {
    s.model = GroupModel::heisenberg3();
    s.params.dim = 3;
    s.params.inertia = Eigen::Vector3d::Ones();
    auto [L, H] = detail::mechanical_pair(s.model, s.params.inertia, 0.0);
    s.lagrangian = L;
    s.hamiltonian = H;
    s.initial.g = s.model.identity();
    s.initial.mu = DualVec{1.0, 0.5, 0.3};
  } else if (name == "linear_degenerate") {
    s.model = GroupModel::so3();
    s.params.dim = 3;
    s.params.linear_coeff = Eigen::Vector3d(1.0, 0.0, 0.0);
    s.lagrangian = detail::linear_lagrangian(s.model, s.params.linear_coeff);
    s.initial.g = s.model.identity();
    s.initial.xi = AlgVec{1.0, 0.0, 0.0};
    s.initial.mu = DualVec(s.params.linear_coeff);
  } else {
    throw ConfigError("system: unknown builtin '" + name +
                      "' (expected free_rigid_body, rigid_body_potential, abelian_particle, heisenberg_free "
                      "or linear_degenerate)");
  }
  detail::fill_initial(s);
  return s;
}

inline std::vector<std::string> builtin_names() {
  return {"abelian_particle", "free_rigid_body", "heisenberg_free", "linear_degenerate", "rigid_body_potential"};
}

/// max |h_L(g, mu) - H(g, mu)| over samples, h_L the fiberwise Legendre
/// transform of L at fixed g. Infinity when L is degenerate.
inline double legendre_pair_mismatch(const LagrangianField& L, const HamiltonianField& H, int samples = 8,
                                     unsigned seed = 11) {
  const GroupModel& G = L.model;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    GroupElement g = G.random_element(rng);
    DualVec mu = G.random_dual(rng);
    LagrangianField Lg = L;
    Lg.reduced = true;
    Lg.eval = [L, g](const GroupElement&, const AlgVec& x) { return L.value(g, x); };
    if (L.fiber_grad) Lg.fiber_grad = [L, g](const GroupElement&, const AlgVec& x) { return L.d_fiber(g, x); };
    if (L.fiber_hess) Lg.fiber_hess = [L, g](const GroupElement&, const AlgVec& x) { return L.hess_fiber(g, x); };
    try {
      HamiltonianField h = legendre_transform(Lg);
      worst = std::max(worst, std::abs(h.value(G.identity(), mu) - H.value(g, mu)));
    } catch (const DegenerateLagrangian&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

struct ConfigResult {
  SystemSpec spec;
  std::vector<std::string> warnings;
};

namespace detail {

using nlohmann::json;

inline double json_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
  return v;
}

inline Eigen::VectorXd json_vector(const json& j, const std::string& path, int n) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of " + std::to_string(n) + " numbers");
  if (int(j.size()) != n)
    throw ConfigError(path + ": expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = json_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Eigen::MatrixXd json_matrix(const json& j, const std::string& path, int rows, int cols) {
  if (!j.is_array() || int(j.size()) != rows)
    throw ConfigError(path + ": expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) M.row(i) = json_vector(j[i], path + "[" + std::to_string(i) + "]", cols);
  return M;
}

inline void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key() + ": unknown field");
}

inline std::string json_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

inline SystemSpec custom_system(const json& j, std::vector<std::string>& warnings) {
  reject_unknown(j, "system", {"group", "inertia", "potential_c", "dim", "lagrangian", "linear_coeff",
                               "hamiltonian", "hamiltonian_inertia", "name"});
  if (!j.contains("group")) throw ConfigError("system.group: required");
  std::string gid = json_string(j["group"], "system.group");
  if (gid == "abelian") {
    if (!j.contains("dim")) throw ConfigError("system.dim: required for group 'abelian'");
    gid = "abelian:" + std::to_string(int(json_number(j["dim"], "system.dim")));
  }
  SystemSpec s;
  try {
    s.model = GroupModel::from_name(gid);
  } catch (const StructuralError& e) {
    throw ConfigError(std::string("system.group: ") + e.what());
  }
  const int n = s.model.dim();
  if (j.contains("dim")) {
    double d = json_number(j["dim"], "system.dim");
    if (d != n) throw ConfigError("system.dim: " + std::to_string(int(d)) + " does not match group dimension " + std::to_string(n));
  }
  s.name = j.contains("name") ? json_string(j["name"], "system.name") : "custom:" + gid;
  s.params.dim = n;
  // inertia: a diagonal as n numbers, or a full symmetric positive definite n x n matrix
  Eigen::MatrixXd kinetic = Eigen::MatrixXd::Identity(n, n);
  bool full = false;
  if (j.contains("inertia")) {
    const json& ji = j["inertia"];
    full = ji.is_array() && !ji.empty() && ji[0].is_array();
    if (full) {
      kinetic = json_matrix(ji, "system.inertia", n, n);
      if ((kinetic - kinetic.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, kinetic.cwiseAbs().maxCoeff()))
        throw ConfigError("system.inertia: matrix must be symmetric");
      if (kinetic.llt().info() != Eigen::Success)
        throw ConfigError("system.inertia: must be positive definite");
    } else {
      Eigen::VectorXd d = json_vector(ji, "system.inertia", n);
      for (int i = 0; i < n; ++i)
        if (!(d(i) > 0.0))
          throw ConfigError("system.inertia[" + std::to_string(i) + "]: must be > 0 (inertia must be positive definite)");
      kinetic = d.asDiagonal();
    }
  }
  s.params.inertia = kinetic.diagonal();
  s.params.kinetic = kinetic;
  if (j.contains("potential_c")) s.params.potential_c = json_number(j["potential_c"], "system.potential_c");
  if (s.params.potential_c != 0.0 && s.model.kind() == GroupKind::Heisenberg3)
    throw ConfigError("system.potential_c: no potential is defined on heisenberg3");

  std::string lag = j.contains("lagrangian") ? json_string(j["lagrangian"], "system.lagrangian") : "quadratic";
  std::string ham = j.contains("hamiltonian") ? json_string(j["hamiltonian"], "system.hamiltonian")
                                              : (lag == "quadratic" ? "quadratic" : "none");
  if (lag != "quadratic" && lag != "linear" && lag != "none")
    throw ConfigError("system.lagrangian: expected quadratic, linear or none");
  if (ham != "quadratic" && ham != "none") throw ConfigError("system.hamiltonian: expected quadratic or none");
  if (lag == "none" && ham == "none") throw ConfigError("system: at least one of lagrangian/hamiltonian is required");

  auto [L, H] = full ? mechanical_pair_form(s.model, kinetic, s.params.potential_c)
                     : mechanical_pair(s.model, s.params.inertia, s.params.potential_c);
  if (lag == "quadratic") s.lagrangian = L;
  if (lag == "linear") {
    if (!j.contains("linear_coeff")) throw ConfigError("system.linear_coeff: required for a linear lagrangian");
    if (s.params.potential_c != 0.0) throw ConfigError("system.potential_c: not supported with a linear lagrangian");
    s.params.linear_coeff = json_vector(j["linear_coeff"], "system.linear_coeff", n);
    s.lagrangian = linear_lagrangian(s.model, s.params.linear_coeff);
  }
  if (ham == "quadratic") {
    if (j.contains("hamiltonian_inertia")) {
      Eigen::VectorXd Ih = json_vector(j["hamiltonian_inertia"], "system.hamiltonian_inertia", n);
      for (int i = 0; i < n; ++i)
        if (!(Ih(i) > 0.0)) throw ConfigError("system.hamiltonian_inertia[" + std::to_string(i) + "]: must be > 0");
      s.hamiltonian = mechanical_pair(s.model, Ih, s.params.potential_c).second;
    } else {
      s.hamiltonian = H;
    }
  }
  if (s.lagrangian && s.hamiltonian) {
    double mis = legendre_pair_mismatch(*s.lagrangian, *s.hamiltonian);
    if (!(mis <= 1e-8))
      warnings.push_back("lagrangian and hamiltonian are not a Legendre pair (max mismatch " + std::to_string(mis) + ")");
  }
  s.initial.g = s.model.identity();
  s.initial.mu = DualVec(Eigen::VectorXd::Ones(n));
  return s;
}

}  // namespace detail

/// Parses {"system": name | {...}, "initial": {...}}; other top-level keys are ignored here.
inline ConfigResult from_config(const nlohmann::json& doc) {
  using detail::json;
  if (!doc.is_object()) throw ConfigError("document: expected a JSON object");
  if (!doc.contains("system")) throw ConfigError("system: required");
  ConfigResult out;
  const json& sys = doc["system"];
  if (sys.is_string()) out.spec = builtin(sys.get<std::string>());
  else if (sys.is_object()) out.spec = detail::custom_system(sys, out.warnings);
  else throw ConfigError("system: expected a builtin name or an object");

  SystemSpec& s = out.spec;
  if (doc.contains("initial") && !doc["initial"].is_null()) {
    const json& ini = doc["initial"];
    if (!ini.is_object()) throw ConfigError("initial: expected an object");
    detail::reject_unknown(ini, "initial", {"g", "mu", "xi"});
    const int n = s.model.dim();
    if (ini.contains("g") && !ini["g"].is_null()) {
      Eigen::MatrixXd m = s.model.is_matrix_group() ? detail::json_matrix(ini["g"], "initial.g", 3, 3)
                                                     : Eigen::MatrixXd(detail::json_vector(ini["g"], "initial.g", n));
      try {
        s.initial.g = s.model.element(m);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("initial.g: ") + e.what());
      }
    }
    bool has_mu = ini.contains("mu") && !ini["mu"].is_null();
    bool has_xi = ini.contains("xi") && !ini["xi"].is_null();
    if (has_mu) s.initial.mu = DualVec(detail::json_vector(ini["mu"], "initial.mu", n));
    if (has_xi) s.initial.xi = AlgVec(detail::json_vector(ini["xi"], "initial.xi", n));
    if (has_mu && !has_xi) s.initial.xi.reset();
    if (has_xi && !has_mu && s.lagrangian) {
      try {
        s.initial.mu = s.lagrangian->d_fiber(s.initial.g, *s.initial.xi);
      } catch (const Error&) {
      }
    }
  }
  detail::fill_initial(s);
  return out;
}

}  // namespace gmtk

#endif  // GMTK_SYSTEMS_HPP
