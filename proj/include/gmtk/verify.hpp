#ifndef GMTK_VERIFY_HPP
#define GMTK_VERIFY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "integrate.hpp"
#include "legendre.hpp"
#include "oracle.hpp"
#include "reduction.hpp"
#include "systems.hpp"
#include "triplet.hpp"

namespace gmtk {

struct PropertyResult {
  std::string suite;
  std::string name;
  int samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  unsigned seed = 42;
  int samples = 0;                          ///< overrides per-property sample counts when > 0
  std::map<std::string, double> tolerances; ///< by property name or suite.name
  std::set<std::string> suites;             ///< empty runs every suite
};

namespace detail {

/// Collects the properties of one suite.
class Suite {
 public:
  Suite(std::string name, const VerifyOptions& opt) : name_(std::move(name)), opt_(opt) {}

  int count(int dflt) const { return opt_.samples > 0 ? opt_.samples : dflt; }

  void add(const std::string& prop, int samples, double violation, double tol) {
    // most specific key wins; "name" also covers every "name[tag]" variant
    const std::string base = prop.substr(0, prop.find('['));
    for (const std::string& key : {name_ + "." + prop, prop, name_ + "." + base, base}) {
      if (auto it = opt_.tolerances.find(key); it != opt_.tolerances.end()) {
        tol = it->second;
        break;
      }
    }
    // NaN never passes
    out_.push_back({name_, prop, samples, violation, tol, violation <= tol});
  }

  /// Runs body and records its result; a thrown error is a failed property.
  template <class F>
  void check(const std::string& prop, int samples, double tol, F&& body) {
    double v;
    try {
      v = body();
    } catch (const std::exception&) {
      v = std::numeric_limits<double>::infinity();
    }
    add(prop, samples, v, tol);
  }

  std::vector<PropertyResult> take() { return std::move(out_); }

 private:
  std::string name_;
  const VerifyOptions& opt_;
  std::vector<PropertyResult> out_;
};

inline std::vector<GroupModel> verify_groups() {
  return {GroupModel::so3(), GroupModel::heisenberg3(), GroupModel::abelian(3)};
}

inline TripletPoint sample_triplet(const GroupModel& G, std::mt19937_64& rng) {
  return {G.random_element(rng), G.random_dual(rng), G.random_alg(rng), G.random_dual(rng)};
}

inline Generator sample_generator(const GroupModel& G, std::mt19937_64& rng) {
  return {G.random_alg(rng), G.random_dual(rng), G.random_alg(rng), G.random_dual(rng)};
}

inline double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

// -- isotropy of parametrized submanifolds, shared with the CLI

/// Largest |Omega(t_i, t_j)| over the 2n coordinate tangents of a map
/// (g, x) -> TT*G, tangents taken by finite differences.
template <class Param>
double isotropy_violation(const GroupModel& G, Param&& param, const GroupElement& g, const Eigen::VectorXd& x) {
  const int n = G.dim();
  TripletPoint base = param(g, x);
  auto as_point = [&](const oracle::Point& q) { return oracle::to_point(param(q.g, q.x)); };
  std::vector<TripletTangent> ts;
  for (int d = 0; d < 2 * n; ++d) {
    oracle::Tangent dir{AlgVec::zero(n), Eigen::VectorXd::Zero(n)};
    if (d < n) dir.a(d) = 1.0;
    else dir.b(d - n) = 1.0;
    ts.push_back(oracle::to_triplet_tangent(base, oracle::pushforward(G, G, as_point, {g, x}, dir)));
  }
  double worst = 0.0;
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i + 1; j < 2 * n; ++j) worst = std::max(worst, std::abs(omega2(G, ts[i], ts[j])));
  return worst;
}

inline double isotropy_S(const LagrangianField& L, const GroupElement& g, const AlgVec& xi) {
  return isotropy_violation(
      L.model, [&](const GroupElement& h, const Eigen::VectorXd& x) { return submanifold_S(L, h, AlgVec(x)); }, g, xi.v);
}

inline double isotropy_Sprime(const HamiltonianField& H, const GroupElement& g, const DualVec& mu) {
  return isotropy_violation(
      H.model, [&](const GroupElement& h, const Eigen::VectorXd& x) { return submanifold_Sprime(H, {h, DualVec(x)}); },
      g, mu.v);
}

/// |sigma(S(g, xi)) - dL| and |omega_flat(S'(g, mu)) - (-dH)| in the max norm.
inline double sigma_consistency(const LagrangianField& L, const GroupElement& g, const AlgVec& xi) {
  CotTanPoint a = sigma(L.model, submanifold_S(L, g, xi));
  CotTanPoint b = lagrangian_differential(L, g, xi);
  return std::max((a.alpha - b.alpha).max_abs(), (a.beta - b.beta).max_abs());
}

inline double omega_flat_consistency(const HamiltonianField& H, const PhaseState& s) {
  CotCotPoint a = omega_flat(H.model, submanifold_Sprime(H, s));
  CotCotPoint b = hamiltonian_differential(H, s);
  return std::max((a.alpha - b.alpha).max_abs(), (a.eta - b.eta).max_abs());
}

// -- suites

namespace suites {

inline void algebra(detail::Suite& S, std::mt19937_64& rng) {
  const int n = S.count(100);
  for (const auto& G : detail::verify_groups()) {
    const std::string tag = "[" + G.id() + "]";
    AlgebraReport rep = validate(G.algebra());
    S.add("jacobi" + tag, 1, std::max(rep.antisymmetry, rep.jacobi), 1e-12);
    S.check("ad_star_duality" + tag, n, 1e-10, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        AlgVec xi = G.random_alg(rng), eta = G.random_alg(rng);
        DualVec mu = G.random_dual(rng);
        w = std::max(w, std::abs(pair(G.ad_star(xi, mu), eta) - pair(mu, G.bracket(xi, eta))));
      }
      return w;
    });
  }
}

inline void group(detail::Suite& S, std::mt19937_64& rng) {
  const int n = S.count(100);
  for (const auto& G : detail::verify_groups()) {
    const std::string tag = "[" + G.id() + "]";
    S.check("Ad_star_duality" + tag, n, 1e-10, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        GroupElement g = G.random_element(rng);
        DualVec mu = G.random_dual(rng);
        AlgVec xi = G.random_alg(rng);
        w = std::max(w, std::abs(pair(G.Ad_star(g, mu), xi) - pair(mu, G.Ad(G.inv(g), xi))));
      }
      return w;
    });
    S.check("Ad_star_derivative" + tag, n, 1e-6, [&] {
      const double h = 1e-4;
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        AlgVec xi = G.random_alg(rng);
        DualVec mu = G.random_dual(rng);
        DualVec d = (G.Ad_star(G.exp(h * xi), mu) - G.Ad_star(G.exp(-h * xi), mu)) / (2 * h);
        w = std::max(w, (d + G.ad_star(xi, mu)).max_abs());
      }
      return w;
    });
    S.check("hat_antihomomorphism" + tag, n, 1e-12, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        AlgVec a = G.random_alg(rng), b = G.random_alg(rng);
        Eigen::MatrixXd A = G.hat(a), B = G.hat(b);
        w = std::max(w, (G.hat(G.bracket(a, b)) + (A * B - B * A)).cwiseAbs().maxCoeff());
      }
      return w;
    });
    S.check("exp_log_roundtrip" + tag, n, 1e-12, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        AlgVec a = G.random_alg(rng);
        // stay inside the injectivity radius of exp on SO(3)
        if (G.kind() == GroupKind::SO3 && a.norm() > 3.0) a = (2.5 / a.norm()) * a;
        w = std::max(w, (G.log(G.exp(a)) - a).max_abs());
      }
      return w;
    });
  }
}

inline void triplet(detail::Suite& S, std::mt19937_64& rng) {
  const int n = S.count(50);
  for (const auto& G : detail::verify_groups()) {
    const std::string tag = "[" + G.id() + "]";
    auto th1 = oracle::triplet_form(G, [G](const TripletPoint& q, const Generator& k) { return theta1(G, q, k); });
    auto th2 = oracle::triplet_form(G, [G](const TripletPoint& q, const Generator& k) { return theta2(G, q, k); });
    double w1 = 0.0, w2 = 0.0, wd = 0.0;
    try {
      for (int s = 0; s < n; ++s) {
        TripletPoint p = detail::sample_triplet(G, rng);
        Generator a = detail::sample_generator(G, rng), b = detail::sample_generator(G, rng);
        auto X = oracle::triplet_field(G, a), Y = oracle::triplet_field(G, b);
        double om = omega2(G, p, a, b);
        w1 = std::max(w1, std::abs(oracle::exterior_derivative(G, th1, X, Y, oracle::to_point(p)) - om));
        w2 = std::max(w2, std::abs(oracle::exterior_derivative(G, th2, X, Y, oracle::to_point(p)) - om));
        auto potential = [](const oracle::Point& q) {
          TripletPoint t = oracle::to_triplet(q);
          return pair(t.mu, t.xi);
        };
        double d = oracle::directional(G, potential, oracle::to_point(p), oracle::to_tangent(right_invariant_vf(G, a, p)));
        wd = std::max(wd, std::abs(theta2(G, p, a) - theta1(G, p, a) - d));
      }
    } catch (const std::exception&) {
      w1 = w2 = wd = std::numeric_limits<double>::infinity();
    }
    S.add("omega_is_d_theta1" + tag, n, w1, 1e-6);
    S.add("omega_is_d_theta2" + tag, n, w2, 1e-6);
    S.add("theta_difference_exact" + tag, n, wd, 1e-8);
    S.check("map_roundtrips" + tag, n, 1e-12, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        TripletPoint p = detail::sample_triplet(G, rng);
        TripletPoint a = sigma_inv(G, sigma(G, p)), b = omega_sharp(G, omega_flat(G, p));
        for (const TripletPoint& q : {a, b})
          w = std::max({w, (q.g.mat - p.g.mat).cwiseAbs().maxCoeff(), (q.mu - p.mu).max_abs(),
                        (q.xi - p.xi).max_abs(), (q.nu - p.nu).max_abs()});
      }
      return w;
    });
  }
  // abelian case against the classical canonical formulas
  auto A = GroupModel::abelian(3);
  S.check("abelian_classical", n, 1e-12, [&] {
    double w = 0.0;
    for (int s = 0; s < n; ++s) {
      TripletPoint p = detail::sample_triplet(A, rng);
      Generator a = detail::sample_generator(A, rng), b = detail::sample_generator(A, rng);
      double t1 = p.nu.v.dot(a.xi2.v) - p.xi.v.dot(a.nu2.v);
      double t2 = p.mu.v.dot(a.xi3.v) + p.nu.v.dot(a.xi2.v);
      double om = a.nu3.v.dot(b.xi2.v) - b.nu3.v.dot(a.xi2.v) + a.nu2.v.dot(b.xi3.v) - b.nu2.v.dot(a.xi3.v);
      CotTanPoint q = sigma(A, p);
      CotCotPoint r = omega_flat(A, p);
      w = std::max({w, std::abs(theta1(A, p, a) - t1), std::abs(theta2(A, p, a) - t2),
                    std::abs(omega2(A, p, a, b) - om), (q.alpha - p.nu).max_abs(), (q.beta - p.mu).max_abs(),
                    (r.alpha - p.nu).max_abs(), (r.eta + p.xi).max_abs()});
    }
    return w;
  });
}

inline void dynamics(detail::Suite& S, std::mt19937_64& rng) {
  const int n = S.count(10);
  for (const auto& name : {"abelian_particle", "free_rigid_body", "heisenberg_free", "rigid_body_potential"}) {
    SystemSpec sys = builtin(name);
    const GroupModel& G = sys.model;
    const std::string tag = std::string("[") + name + "]";
    const LagrangianField& L = *sys.lagrangian;
    const HamiltonianField& H = *sys.hamiltonian;
    S.check("isotropy_S" + tag, n, 1e-6, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) w = std::max(w, isotropy_S(L, G.random_element(rng), G.random_alg(rng)));
      return w;
    });
    S.check("isotropy_Sprime" + tag, n, 1e-6, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) w = std::max(w, isotropy_Sprime(H, G.random_element(rng), G.random_dual(rng)));
      return w;
    });
    S.check("sigma_consistency" + tag, n, 1e-9, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) w = std::max(w, sigma_consistency(L, G.random_element(rng), G.random_alg(rng)));
      return w;
    });
    S.check("omega_flat_consistency" + tag, n, 1e-9, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s)
        w = std::max(w, omega_flat_consistency(H, {G.random_element(rng), G.random_dual(rng)}));
      return w;
    });
    S.check("energy_along_hamilton_field" + tag, n, 1e-8, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        PhaseState st{G.random_element(rng), G.random_dual(rng)};
        HamiltonVelocity v = hamilton_vector_field(H, st);
        w = std::max(w, std::abs(central_derivative(
                            [&](double e) { return H.value(perturb(G, st.g, v.gdot, e), st.mu + e * v.mudot); })));
      }
      return w;
    });
  }
}

inline void reduction(detail::Suite& S, std::mt19937_64& rng) {
  const int n = S.count(200);
  auto diff = [](const ReducedPoint& a, const ReducedPoint& b) {
    return std::max({(a.lam - b.lam).max_abs(), (a.mu - b.mu).max_abs(), (a.xi - b.xi).max_abs()});
  };
  for (const auto& G : detail::verify_groups()) {
    const std::string tag = "[" + G.id() + "]";
    S.check("red_diff_kappa" + tag, n, 1e-12, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        TripletPoint p = detail::sample_triplet(G, rng);
        w = std::max(w, diff(kappa_inv(project_TstarTG(G, sigma(G, p))), project_TTstarG(G, p)));
      }
      return w;
    });
    S.check("red_diff_omega" + tag, n, 1e-12, [&] {
      double w = 0.0;
      for (int s = 0; s < n; ++s) {
        TripletPoint p = detail::sample_triplet(G, rng);
        w = std::max(w, diff(omega_sharp_red(project_TstarTstarG(G, omega_flat(G, p))), project_TTstarG(G, p)));
      }
      return w;
    });
    // d chi (X, Y) = X chi(Y) - Y chi(X) - chi([X, Y]) with the orbit slot held fixed; chi is
    // affine in the moving slots, so unit-step central differences are exact
    const int m = S.count(50);
    double w1 = 0.0, w2 = 0.0;
    for (int s = 0; s < m; ++s) {
      ReducedPoint z{G.random_dual(rng), G.random_dual(rng), G.random_alg(rng)};
      ReducedGenerator a{G.random_alg(rng), G.random_dual(rng), G.random_alg(rng)};
      ReducedGenerator b{G.random_alg(rng), G.random_dual(rng), G.random_alg(rng)};
      auto along = [&](auto chi, const ReducedGenerator& x, const ReducedGenerator& k) {
        ReducedTangent t = reduced_vf(G, x, z);
        return central_derivative(
            [&](double e) { return chi(ReducedPoint{z.lam, z.mu + e * t.d_mu, z.xi + e * t.d_xi}, k); },
            FdOptions{1.0, false});
      };
      auto d = [&](auto chi) { return along(chi, a, b) - along(chi, b, a) - chi(z, reduced_bracket(G, a, b)); };
      double om = omega_zd(G, z, a, b);
      w1 = std::max(w1, std::abs(d([](const ReducedPoint& q, const ReducedGenerator& k) { return chi1(q, k); }) - om));
      w2 = std::max(w2, std::abs(d([](const ReducedPoint& q, const ReducedGenerator& k) { return chi2(q, k); }) - om));
    }
    S.add("omega_is_d_chi1" + tag, m, w1, 1e-12);
    S.add("omega_is_d_chi2" + tag, m, w2, 1e-12);
  }
  for (const auto& name : {"free_rigid_body", "heisenberg_free"}) {
    SystemSpec sys = builtin(name);
    const GroupModel& G = sys.model;
    const std::string tag = std::string("[") + name + "]";
    const int k = S.count(20);
    S.check("dirac_tau" + tag, k, 1e-8, [&] {
      double w = 0.0;
      for (int s = 0; s < k; ++s)
        w = std::max(w, dirac_identity_tau(*sys.lagrangian, lagrange_dirac(*sys.lagrangian, G.random_alg(rng))));
      return w;
    });
    S.check("dirac_pi" + tag, k, 1e-8, [&] {
      double w = 0.0;
      for (int s = 0; s < k; ++s)
        w = std::max(w, dirac_identity_pi(*sys.hamiltonian, hamilton_dirac(*sys.hamiltonian, G.random_dual(rng))));
      return w;
    });
  }
}

inline void legendre(detail::Suite& S, std::mt19937_64& rng) {
  SystemSpec rb = builtin("free_rigid_body");
  const GroupModel& G = rb.model;
  const GroupElement e = G.identity();
  const int n = S.count(100);
  S.check("roundtrip[free_rigid_body]", n, 1e-9, [&] {
    LagrangianField back = legendre_inverse(legendre_transform(*rb.lagrangian));
    double w = 0.0;
    for (int s = 0; s < n; ++s) {
      AlgVec xi = G.random_alg(rng);
      w = std::max(w, std::abs(back.value(e, xi) - rb.lagrangian->value(e, xi)));
      w = std::max(w, (back.d_fiber(e, xi) - rb.lagrangian->d_fiber(e, xi)).max_abs());
    }
    return w;
  });
  const int m = S.count(10);
  S.check("morse_omega_hat[free_rigid_body]", m, 1e-8, [&] {
    HamiltonianField h = legendre_transform(*rb.lagrangian);
    MorseFamily E = make_reduced_l2h(*rb.lagrangian);
    double w = 0.0;
    for (int s = 0; s < m; ++s) {
      DualVec mu = G.random_dual(rng);
      GenerateResult res = generate(E, {std::nullopt, mu.v});
      if (res.points.size() != 1) return std::numeric_limits<double>::infinity();
      ReducedPoint a = generated_reduced_l2h(G, res.points[0]);
      ReducedPoint b = hamilton_dirac(h, mu);
      w = std::max({w, (a.lam - b.lam).max_abs(), (a.mu - b.mu).max_abs(), (a.xi - b.xi).max_abs()});
    }
    return w;
  });
  S.check("rank_check[free_rigid_body]", m, 0.0, [&] {
    MorseFamily E = make_reduced_l2h(*rb.lagrangian);
    double fails = 0;
    for (int s = 0; s < m; ++s)
      if (!rank_check(E, {std::nullopt, G.random_dual(rng).v}, G.random_alg(rng).v).pass) fails += 1;
    return fails;
  });
  // violation 0 when the Morse family is regular and the transform is refused, 1 otherwise
  S.check("degenerate_refused[linear_degenerate]", m, 0.0, [&] {
    SystemSpec d = builtin("linear_degenerate");
    MorseFamily E = make_reduced_l2h(*d.lagrangian);
    double bad = 0;
    for (int s = 0; s < m; ++s)
      if (!rank_check(E, {std::nullopt, G.random_dual(rng).v}, G.random_alg(rng).v).pass) bad += 1;
    try {
      legendre_transform(*d.lagrangian);
      bad += 1;
    } catch (const DegenerateLagrangian&) {
    }
    return bad;
  });
}

inline void integrate(detail::Suite& S, std::mt19937_64&) {
  SystemSpec rb = builtin("free_rigid_body");
  const IntegratorSpec long_run{Method::rkmk4, 1e-3, 10000, 1};
  S.check("ep_matches_lp[free_rigid_body]", 10001, 1e-6, [&] {
    TrajectoryRecord lp = integrate_lie_poisson(*rb.hamiltonian, *rb.initial.mu, long_run);
    TrajectoryRecord ep = integrate_euler_poincare(*rb.lagrangian, *rb.initial.xi, long_run);
    if (lp.failed || ep.failed || lp.size() != ep.size()) return std::numeric_limits<double>::infinity();
    double w = 0.0;
    for (std::size_t k = 0; k < lp.size(); ++k)
      w = std::max(w, detail::max_abs(lp.fibers[k] - rb.lagrangian->d_fiber(GroupModel::so3().identity(), AlgVec(ep.fibers[k])).v));
    return w;
  });
  S.check("exact_reduction[free_rigid_body]", 1001, 0.0, [&] {
    IntegratorSpec spec{Method::rkmk4, 1e-2, 1000, 1};
    TrajectoryRecord full = integrate_hamilton(*rb.hamiltonian, {rb.initial.g, *rb.initial.mu}, spec);
    TrajectoryRecord lp = integrate_lie_poisson(*rb.hamiltonian, *rb.initial.mu, spec);
    TrajectoryRecord el = integrate_trivialized_el(*rb.lagrangian, rb.initial.g, *rb.initial.xi, spec);
    TrajectoryRecord ep = integrate_euler_poincare(*rb.lagrangian, *rb.initial.xi, spec);
    for (auto* r : {&full, &lp, &el, &ep})
      if (r->failed || r->size() != 1001) return std::numeric_limits<double>::infinity();
    return std::max(sup_fiber_error(full, lp), sup_fiber_error(el, ep));
  });
  TrajectoryRecord run = integrate_hamilton(*rb.hamiltonian, {rb.initial.g, *rb.initial.mu}, long_run);
  std::vector<double> cas;
  for (auto& c : run.casimirs) cas.push_back(c.at(0));
  const double inf = std::numeric_limits<double>::infinity();
  S.add("casimir_drift[free_rigid_body]", int(run.size()), run.failed ? inf : drift(cas, true), 1e-6);
  S.add("energy_drift[free_rigid_body]", int(run.size()), run.failed ? inf : drift(run.energy, true), 1e-6);
  S.add("so3_constraint[free_rigid_body]", int(run.size()),
        run.failed ? inf : *std::max_element(run.constraint_residual.begin(), run.constraint_residual.end()), 1e-9);
  // sup over the shared 0.04 time grid on [0, 2] against a run with step 0.04 / 16
  S.check("rkmk4_order[free_rigid_body]", 3, 0.3, [&] {
    auto run_at = [&](double dt) {
      const int steps = int(std::lround(2.0 / dt)), stride = int(std::lround(0.04 / dt));
      TrajectoryRecord r = integrate_hamilton(*rb.hamiltonian, {rb.initial.g, *rb.initial.mu},
                                              {Method::rkmk4, dt, steps, stride});
      if (r.failed) throw EvaluationError(r.error);
      return r;
    };
    TrajectoryRecord ref = run_at(0.04 / 16);
    auto err = [&](double dt) {
      TrajectoryRecord r = run_at(dt);
      double w = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k)
        w = std::max({w, detail::max_abs(r.fibers[k] - ref.fibers[k]),
                      (r.groups[k].mat - ref.groups[k].mat).cwiseAbs().maxCoeff()});
      return w;
    };
    return std::abs(std::log2(err(0.04) / err(0.02)) - 4.0);
  });
  S.check("classical_rk4_baseline[abelian_particle]", 1001, 1e-12, [&] {
    SystemSpec ap = builtin("abelian_particle");
    const double dt = 0.01, c = ap.params.potential_c;
    TrajectoryRecord r = integrate_hamilton(*ap.hamiltonian, {ap.initial.g, *ap.initial.mu}, {Method::rkmk4, dt, 1000, 1});
    if (r.failed) return inf;
    Eigen::VectorXd q = ap.initial.g.vec(), p = ap.initial.mu->v;
    const Eigen::VectorXd m = ap.params.inertia;
    double w = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      auto fq = [&](const Eigen::VectorXd& pp) { return Eigen::VectorXd(pp.cwiseQuotient(m)); };
      auto fp = [&](const Eigen::VectorXd& qq) { return Eigen::VectorXd(-c * qq); };
      Eigen::VectorXd q1 = dt * fq(p), p1 = dt * fp(q);
      Eigen::VectorXd q2 = dt * fq(p + p1 / 2), p2 = dt * fp(q + q1 / 2);
      Eigen::VectorXd q3 = dt * fq(p + p2 / 2), p3 = dt * fp(q + q2 / 2);
      Eigen::VectorXd q4 = dt * fq(p + p3), p4 = dt * fp(q + q3);
      q += (q1 + 2 * q2 + 2 * q3 + q4) / 6;
      p += (p1 + 2 * p2 + 2 * p3 + p4) / 6;
      w = std::max({w, detail::max_abs(q - r.groups[k].vec()), detail::max_abs(p - r.fibers[k])});
    }
    return w;
  });
}

inline void systems(detail::Suite& S, std::mt19937_64& rng) {
  for (const auto& name : builtin_names()) {
    SystemSpec s = builtin(name);
    S.add("algebra_valid[" + name + "]", 1, validate(s.model.algebra()).pass ? 0.0 : 1.0, 0.0);
    if (s.lagrangian && s.hamiltonian)
      S.check("legendre_pair[" + name + "]", 8, 1e-8, [&] { return legendre_pair_mismatch(*s.lagrangian, *s.hamiltonian); });
  }
  const int n = S.count(10);
  S.check("zero_potential_is_free_body", n, 1e-12, [&] {
    SystemSpec free = builtin("free_rigid_body");
    auto c0 = detail::mechanical_pair(free.model, free.params.inertia, 0.0).first;
    c0.reduced = false;  // exercise the unreduced path
    double w = 0.0;
    for (int s = 0; s < n; ++s) {
      GroupElement g = free.model.random_element(rng);
      AlgVec xi = free.model.random_alg(rng);
      w = std::max(w, (el_vector_field(c0, g, xi).xidot - euler_poincare_vf(*free.lagrangian, xi)).max_abs());
    }
    return w;
  });
}

using SuiteFn = void (*)(detail::Suite&, std::mt19937_64&);

inline const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r = {
      {"algebra", &algebra},       {"dynamics", &dynamics}, {"group", &group},     {"integrate", &integrate},
      {"legendre", &legendre},     {"reduction", &reduction}, {"systems", &systems}, {"triplet", &triplet}};
  return r;
}

}  // namespace suites

inline std::vector<std::string> suite_names() {
  std::vector<std::string> v;
  for (const auto& [k, _] : suites::registry()) v.push_back(k);
  return v;
}

/// Runs the selected suites concurrently. Each suite draws from its own
/// generator, seeded from the seed and the suite name, so the report does
/// not depend on scheduling; entries are ordered by suite name.
inline std::vector<PropertyResult> run_verification(const VerifyOptions& opt) {
  for (const auto& s : opt.suites)
    if (!suites::registry().count(s)) throw StructuralError("unknown suite '" + s + "'");
  std::vector<std::pair<std::string, std::future<std::vector<PropertyResult>>>> jobs;
  for (const auto& [name, fn] : suites::registry()) {
    if (!opt.suites.empty() && !opt.suites.count(name)) continue;
    jobs.emplace_back(name, std::async(std::launch::async, [&opt, name = name, fn = fn] {
                        std::seed_seq seq(name.begin(), name.end());
                        std::vector<std::uint32_t> words(2);
                        seq.generate(words.begin(), words.end());
                        std::mt19937_64 rng(opt.seed ^ ((std::uint64_t(words[0]) << 32) | words[1]));
                        detail::Suite S(name, opt);
                        try {
                          fn(S, rng);
                        } catch (const std::exception&) {
                          S.add("suite_completed", 0, std::numeric_limits<double>::infinity(), 0.0);
                        }
                        return S.take();
                      }));
  }
  std::vector<PropertyResult> out;
  for (auto& [_, f] : jobs) {
    auto part = f.get();
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

inline bool all_pass(const std::vector<PropertyResult>& r) {
  return std::all_of(r.begin(), r.end(), [](const PropertyResult& p) { return p.pass; });
}

}  // namespace gmtk

#endif  // GMTK_VERIFY_HPP
