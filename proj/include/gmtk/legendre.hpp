#ifndef GMTK_LEGENDRE_HPP
#define GMTK_LEGENDRE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "fields.hpp"
#include "reduction.hpp"
#include "triplet.hpp"

namespace gmtk {

/// Which space a Morse family is fibered over.
enum class BaseKind { GroupDual, GroupAlg, Dual, Alg };

inline bool has_group(BaseKind k) { return k == BaseKind::GroupDual || k == BaseKind::GroupAlg; }

/// Base point: optional group element plus linear coordinates.
struct MorseBase {
  std::optional<GroupElement> g;
  Eigen::VectorXd x;
};

/// Scalar family E(base, fiber). Optional analytic derivatives let Newton
/// reach the 1e-12 stationarity tolerance; without them finite differences
/// are used and the attainable residual is limited by their noise floor.
struct MorseFamily {
  using Eval = std::function<double(const MorseBase&, const Eigen::VectorXd&)>;
  using Vec = std::function<Eigen::VectorXd(const MorseBase&, const Eigen::VectorXd&)>;
  using Mat = std::function<Eigen::MatrixXd(const MorseBase&, const Eigen::VectorXd&)>;

  GroupModel model;
  BaseKind base_kind = BaseKind::Dual;
  int base_dim = 0;
  int fiber_dim = 0;
  Eval total_eval;
  Vec fiber_grad;  ///< optional dE/dr
  Mat fiber_hess;  ///< optional d2E/dr2
  Vec base_grad;   ///< optional base covector (right gradient in g, then dE/dx)
  FdOptions fd;

  double value(const MorseBase& b, const Eigen::VectorXd& r) const {
    return check_finite(total_eval(b, r), "Morse family evaluation");
  }

  Eigen::VectorXd d_fiber(const MorseBase& b, const Eigen::VectorXd& r) const {
    if (fiber_grad) return check_finite(fiber_grad(b, r), "Morse fiber gradient");
    return fd_gradient([&](const Eigen::VectorXd& y) { return value(b, y); }, r, fd);
  }

  Eigen::MatrixXd hess_fiber(const MorseBase& b, const Eigen::VectorXd& r) const {
    if (fiber_hess) return fiber_hess(b, r);
    if (fiber_grad) return fd_jacobian([&](const Eigen::VectorXd& y) { return d_fiber(b, y); }, r, fd);
    return detail::second_differences([&](const Eigen::VectorXd& y) { return value(b, y); }, r);
  }

  /// Base covector at a fixed fiber point; group components by right_gradient.
  Eigen::VectorXd d_base(const MorseBase& b, const Eigen::VectorXd& r) const {
    if (base_grad) return check_finite(base_grad(b, r), "Morse base gradient");
    Eigen::VectorXd out(base_dim);
    if (b.g) {
      DualVec dg = right_gradient(
          model, [&](const GroupElement& h) { return value({h, b.x}, r); }, *b.g, fd);
      out.head(dg.size()) = dg.v;
    }
    out.tail(b.x.size()) = fd_gradient([&](const Eigen::VectorXd& y) { return value({b.g, y}, r); }, b.x, fd);
    return out;
  }
};

// -- constructors

/// E(g, mu, xi) = L(g, xi) - <mu, xi>, fibered over G x g* by xi.
inline MorseFamily make_EL2H(const LagrangianField& L) {
  MorseFamily E;
  E.model = L.model;
  E.base_kind = BaseKind::GroupDual;
  E.fiber_dim = L.model.dim();
  E.base_dim = 2 * L.model.dim();
  E.fd = L.fd;
  E.total_eval = [L](const MorseBase& b, const Eigen::VectorXd& r) {
    return L.value(*b.g, AlgVec(r)) - b.x.dot(r);
  };
  E.fiber_grad = [L](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return L.d_fiber(*b.g, AlgVec(r)).v - b.x;
  };
  E.fiber_hess = [L](const MorseBase& b, const Eigen::VectorXd& r) { return L.hess_fiber(*b.g, AlgVec(r)); };
  E.base_grad = [L](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::VectorXd {
    Eigen::VectorXd c(2 * r.size());
    c << L.d_group(*b.g, AlgVec(r)).v, -r;
    return c;
  };
  return E;
}

/// E(g, xi, mu) = <mu, xi> - H(g, mu), fibered over G x g by mu.
inline MorseFamily make_H2L(const HamiltonianField& H) {
  MorseFamily E;
  E.model = H.model;
  E.base_kind = BaseKind::GroupAlg;
  E.fiber_dim = H.model.dim();
  E.base_dim = 2 * H.model.dim();
  E.fd = H.fd;
  E.total_eval = [H](const MorseBase& b, const Eigen::VectorXd& r) {
    return r.dot(b.x) - H.value(*b.g, DualVec(r));
  };
  E.fiber_grad = [H](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return b.x - H.d_fiber(*b.g, DualVec(r)).v;
  };
  E.fiber_hess = [H](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::MatrixXd {
    return -H.hess_fiber(*b.g, DualVec(r));
  };
  E.base_grad = [H](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::VectorXd {
    Eigen::VectorXd c(2 * r.size());
    c << -H.d_group(*b.g, DualVec(r)).v, r;
    return c;
  };
  return E;
}

/// E(mu, xi) = l(xi) - <mu, xi>, fibered over g* by xi.
inline MorseFamily make_reduced_l2h(const LagrangianField& l) {
  if (!l.reduced) throw StructuralError("make_reduced_l2h needs a reduced Lagrangian");
  MorseFamily E = make_EL2H(l);
  GroupElement e = l.model.identity();
  E.base_kind = BaseKind::Dual;
  E.base_dim = l.model.dim();
  E.total_eval = [l, e](const MorseBase& b, const Eigen::VectorXd& r) { return l.value(e, AlgVec(r)) - b.x.dot(r); };
  E.fiber_grad = [l, e](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return l.d_fiber(e, AlgVec(r)).v - b.x;
  };
  E.fiber_hess = [l, e](const MorseBase&, const Eigen::VectorXd& r) { return l.hess_fiber(e, AlgVec(r)); };
  E.base_grad = [](const MorseBase&, const Eigen::VectorXd& r) -> Eigen::VectorXd { return -r; };
  return E;
}

/// E(xi, mu) = <mu, xi> - h(mu), fibered over g by mu.
inline MorseFamily make_reduced_h2l(const HamiltonianField& h) {
  if (!h.reduced) throw StructuralError("make_reduced_h2l needs a reduced Hamiltonian");
  MorseFamily E = make_H2L(h);
  GroupElement e = h.model.identity();
  E.base_kind = BaseKind::Alg;
  E.base_dim = h.model.dim();
  E.total_eval = [h, e](const MorseBase& b, const Eigen::VectorXd& r) { return r.dot(b.x) - h.value(e, DualVec(r)); };
  E.fiber_grad = [h, e](const MorseBase& b, const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return b.x - h.d_fiber(e, DualVec(r)).v;
  };
  E.fiber_hess = [h, e](const MorseBase&, const Eigen::VectorXd& r) -> Eigen::MatrixXd {
    return -h.hess_fiber(e, DualVec(r));
  };
  E.base_grad = [](const MorseBase&, const Eigen::VectorXd& r) -> Eigen::VectorXd { return r; };
  return E;
}

// -- rank condition

struct RankReport {
  int rank = 0;
  int required = 0;
  bool pass = false;
  double sigma_max = 0.0;
};

/// Rank of [d2E/dr dx | d2E/dr dr] by four-point mixed differences (h = 1e-4).
inline RankReport rank_check(const MorseFamily& E, const MorseBase& base, const Eigen::VectorXd& fiber,
                             double h = 1e-4) {
  const int nb = E.base_dim, nf = E.fiber_dim;
  const int ng = base.g ? E.model.dim() : 0;
  // moves along coordinate c of the total space; group directions use exp(e e_i) g
  auto shifted = [&](int c, double e, MorseBase& b, Eigen::VectorXd& r) {
    if (c < ng) b.g = perturb(E.model, *b.g, AlgVec::unit(ng, c), e);
    else if (c < nb) b.x(c - ng) += e;
    else r(c - nb) += e;
  };
  auto mixed = [&](int c1, int c2) {
    double s = 0.0;
    for (int a : {1, -1})
      for (int d : {1, -1}) {
        MorseBase b = base;
        Eigen::VectorXd r = fiber;
        shifted(c2, d * h, b, r);
        shifted(c1, a * h, b, r);
        s += a * d * E.value(b, r);
      }
    return s / (4.0 * h * h);
  };
  Eigen::MatrixXd M(nf, nb + nf);
  for (int i = 0; i < nf; ++i)
    for (int c = 0; c < nb + nf; ++c) M(i, c) = mixed(nb + i, c);
  if (!M.allFinite()) throw EvaluationError("non-finite second differences in rank_check");
  RankInfo info = numerical_rank(M);
  return {info.rank, nf, info.rank == nf, info.sigma_max};
}

// -- generation of the Lagrangian submanifold

struct GeneratedPoint {
  MorseBase base;
  Eigen::VectorXd covector;       ///< base differential of E at the stationary fiber
  Eigen::VectorXd fiber_witness;  ///< the stationary fiber point
  double value = 0.0;             ///< E at the witness
  double stationarity = 0.0;      ///< |dE/dr| at the witness

  /// Right-trivialized group part of the covector (empty for linear bases).
  DualVec group_part(int n) const { return base.g ? DualVec(covector.head(n)) : DualVec(); }
  Eigen::VectorXd linear_part() const { return covector.tail(base.x.size()); }
};

struct NewtonOptions {
  double tol = 1e-12;     ///< stationarity residual
  int max_iter = 50;
  double dedup = 1e-8;    ///< distance below which witnesses coincide
  double grid_half = 2.0; ///< grid covers [-grid_half, grid_half]^fiber_dim
  double fd_floor = 1e-8; ///< accepted residual when Newton stagnates on finite-difference gradients
};

struct NewtonResult {
  Eigen::VectorXd r;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton on dE/dr = 0 with a pseudo-inverse step for singular Hessians.
/// Stops at tol, or when the residual stops shrinking (stagnation), in which
/// case the point counts only if the residual is under fd_floor.
inline NewtonResult newton_stationary(const MorseFamily& E, const MorseBase& base, Eigen::VectorXd r,
                                      const NewtonOptions& opt) {
  NewtonResult out;
  Eigen::VectorXd F = E.d_fiber(base, r);
  double res = F.norm();
  int stalled = 0;
  for (int it = 0; it < opt.max_iter && res > opt.tol; ++it) {
    Eigen::MatrixXd J = E.hess_fiber(base, r);
    Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(F);
    if (!step.allFinite() || step.norm() == 0.0) break;
    Eigen::VectorXd rn = r - step;
    Eigen::VectorXd Fn;
    try {
      Fn = E.d_fiber(base, rn);
    } catch (const EvaluationError&) {
      break;
    }
    double rn_res = Fn.norm();
    out.iterations = it + 1;
    if (rn_res >= res) {
      if (++stalled >= 2) break;
    } else {
      stalled = 0;
    }
    if (rn_res <= res) {
      r = rn;
      F = Fn;
      res = rn_res;
    }
  }
  out.r = r;
  out.residual = res;
  out.converged = res <= opt.tol || (!E.fiber_grad && res <= opt.fd_floor);
  return out;
}

struct GenerateResult {
  std::vector<GeneratedPoint> points;
  int starts = 0;
  int converged_starts = 0;
  std::string diagnostic;
};

/// Multi-start Newton over the 3^fiber_dim grid plus seeds; starts run
/// concurrently and the result is sorted by witness, so it is deterministic.
inline GenerateResult generate(const MorseFamily& E, const MorseBase& base,
                               const std::vector<Eigen::VectorXd>& seeds = {}, const NewtonOptions& opt = {}) {
  const int nf = E.fiber_dim;
  std::vector<Eigen::VectorXd> starts = seeds;
  int total = 1;
  for (int i = 0; i < nf; ++i) total *= 3;
  for (int idx = 0; idx < total; ++idx) {
    Eigen::VectorXd s(nf);
    int rem = idx;
    for (int i = 0; i < nf; ++i) {
      s(i) = opt.grid_half * double(rem % 3 - 1);
      rem /= 3;
    }
    starts.push_back(s);
  }

  // fixed worker pool; each worker handles a strided slice of the starts
  std::vector<NewtonResult> results(starts.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(starts.size(), std::max(1u, std::thread::hardware_concurrency())));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < starts.size(); i += workers) {
        try {
          results[i] = newton_stationary(E, base, starts[i], opt);
        } catch (const EvaluationError&) {
          results[i] = NewtonResult{starts[i], 0.0, 0, false};
        }
      }
    }));
  for (auto& j : jobs) j.get();

  GenerateResult out;
  out.starts = int(starts.size());
  std::vector<NewtonResult> found;
  for (auto& r : results) {
    if (r.converged) {
      ++out.converged_starts;
      found.push_back(std::move(r));
    }
  }
  auto lex = [](const NewtonResult& a, const NewtonResult& b) {
    return std::lexicographical_compare(a.r.data(), a.r.data() + a.r.size(), b.r.data(), b.r.data() + b.r.size());
  };
  std::sort(found.begin(), found.end(), lex);
  std::vector<NewtonResult> unique;
  for (auto& f : found) {
    bool dup = std::any_of(unique.begin(), unique.end(),
                           [&](const NewtonResult& u) { return (u.r - f.r).norm() <= opt.dedup; });
    if (!dup) unique.push_back(std::move(f));
  }
  for (const auto& u : unique)
    out.points.push_back({base, E.d_base(base, u.r), u.r, E.value(base, u.r), u.residual});
  if (out.points.empty())
    out.diagnostic = "no Newton start converged (" + std::to_string(out.starts) + " starts)";
  return out;
}

// -- typed images of generated points

/// E^{L->H} point as a trivialized T*T*G point.
inline CotCotPoint generated_TstarTstarG(const GroupModel& G, const GeneratedPoint& p) {
  const int n = G.dim();
  return cotangent_TstarTstarG(G, *p.base.g, DualVec(p.base.x), DualVec(p.covector.head(n)),
                               AlgVec(p.covector.tail(n)));
}

/// E^{H->L} point as a trivialized T*TG point.
inline CotTanPoint generated_TstarTG(const GroupModel& G, const GeneratedPoint& p) {
  const int n = G.dim();
  return cotangent_TstarTG(G, *p.base.g, AlgVec(p.base.x), DualVec(p.covector.head(n)),
                           DualVec(p.covector.tail(n)));
}

/// E^{l->h} point in z_d. The covector over g* is -xi*, and the symplectic
/// identification of T*g* used by omega-hat flips it back, exactly as the
/// trivialized omega-sharp does for E^{L->H}.
inline ReducedPoint generated_reduced_l2h(const GroupModel& G, const GeneratedPoint& p) {
  return embed_omega_hat(G, DualVec(p.base.x), AlgVec(-p.covector));
}

/// E^{h->l} point in z_d through kappa-hat: (ad*_xi mu*, mu*, xi).
inline ReducedPoint generated_reduced_h2l(const GroupModel& G, const GeneratedPoint& p) {
  return embed_kappa_hat(G, AlgVec(p.base.x), DualVec(p.covector));
}

// -- Legendre transform on the reduced wing

namespace detail {

/// Solves grad(y) = target by Newton; warm start is the caller's guess.
template <class Grad, class Hess>
Eigen::VectorXd legendre_solve(Grad&& grad, Hess&& hess, const Eigen::VectorXd& target, Eigen::VectorXd y,
                               bool analytic) {
  const double tol = 1e-12 * std::max(1.0, target.norm());
  Eigen::VectorXd F = grad(y) - target;
  double res = F.norm();
  for (int it = 0; it < 50 && res > tol; ++it) {
    Eigen::VectorXd step = solve_nondegenerate(hess(y), F);
    // backtrack: full Newton steps overshoot when grad grows sublinearly
    Eigen::VectorXd yn = y - step;
    Eigen::VectorXd Fn = grad(yn) - target;
    for (int k = 0; k < 40 && !(Fn.norm() < res); ++k) {
      step *= 0.5;
      yn = y - step;
      Fn = grad(yn) - target;
    }
    if (!(Fn.norm() < res)) break;  // stagnated at the roundoff floor
    y = yn;
    F = Fn;
    res = Fn.norm();
  }
  if (!(res <= tol || (!analytic && res <= 1e-8) || res <= 1e-10))
    throw EvaluationError("Legendre Newton solve did not converge (residual " + std::to_string(res) + ")");
  return y;
}

/// Last solution, reused as the next warm start.
struct WarmStart {
  std::mutex m;
  Eigen::VectorXd key, value;
};

inline void refuse_degenerate(const Eigen::MatrixXd& H) {
  RankInfo info = numerical_rank(H);
  if (info.rank < H.rows()) throw DegenerateLagrangian(info.rank, int(H.rows()), info.condition);
}

}  // namespace detail

/// h(mu) = <mu, xi*> - l(xi*) with dl/dxi(xi*) = mu. Refuses degenerate l
/// (singular fiber Hessian at probe points) with DegenerateLagrangian.
inline HamiltonianField legendre_transform(const LagrangianField& l) {
  if (!l.reduced) throw StructuralError("legendre_transform needs a reduced Lagrangian");
  const GroupModel G = l.model;
  const GroupElement e = G.identity();
  const int n = G.dim();
  std::mt19937_64 probe_rng(7);
  detail::refuse_degenerate(l.hess_fiber(e, AlgVec::zero(n)));
  for (int i = 0; i < 3; ++i) detail::refuse_degenerate(l.hess_fiber(e, G.random_alg(probe_rng)));

  auto cache = std::make_shared<detail::WarmStart>();
  auto solve = [l, e, n, cache](const DualVec& mu) -> AlgVec {
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(n);
    {
      std::lock_guard<std::mutex> lk(cache->m);
      if (cache->key.size() == n && cache->key == mu.v) return AlgVec(cache->value);
      if (cache->value.size() == n) guess = cache->value;
    }
    Eigen::VectorXd xi = detail::legendre_solve(
        [&](const Eigen::VectorXd& y) { return l.d_fiber(e, AlgVec(y)).v; },
        [&](const Eigen::VectorXd& y) { return l.hess_fiber(e, AlgVec(y)); }, mu.v, guess, bool(l.fiber_grad));
    std::lock_guard<std::mutex> lk(cache->m);
    cache->key = mu.v;
    cache->value = xi;
    return AlgVec(xi);
  };
  return reduced_hamiltonian(
      G, [l, e, solve](const DualVec& mu) { AlgVec xi = solve(mu); return pair(mu, xi) - l.value(e, xi); },
      [solve](const DualVec& mu) { return solve(mu); },
      [l, e, solve](const DualVec& mu) -> Eigen::MatrixXd {
        Eigen::MatrixXd H = l.hess_fiber(e, solve(mu));
        return H.inverse();
      });
}

/// l(xi) = <mu*, xi> - h(mu*) with dh/dmu(mu*) = xi.
inline LagrangianField legendre_inverse(const HamiltonianField& h) {
  if (!h.reduced) throw StructuralError("legendre_inverse needs a reduced Hamiltonian");
  const GroupModel G = h.model;
  const GroupElement e = G.identity();
  const int n = G.dim();
  detail::refuse_degenerate(h.hess_fiber(e, DualVec::zero(n)));

  auto cache = std::make_shared<detail::WarmStart>();
  auto solve = [h, e, n, cache](const AlgVec& xi) -> DualVec {
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(n);
    {
      std::lock_guard<std::mutex> lk(cache->m);
      if (cache->key.size() == n && cache->key == xi.v) return DualVec(cache->value);
      if (cache->value.size() == n) guess = cache->value;
    }
    Eigen::VectorXd mu = detail::legendre_solve(
        [&](const Eigen::VectorXd& y) { return h.d_fiber(e, DualVec(y)).v; },
        [&](const Eigen::VectorXd& y) { return h.hess_fiber(e, DualVec(y)); }, xi.v, guess, bool(h.fiber_grad));
    std::lock_guard<std::mutex> lk(cache->m);
    cache->key = xi.v;
    cache->value = mu;
    return DualVec(mu);
  };
  return reduced_lagrangian(
      G, [h, e, solve](const AlgVec& xi) { DualVec mu = solve(xi); return pair(mu, xi) - h.value(e, mu); },
      [solve](const AlgVec& xi) { return solve(xi); },
      [h, e, solve](const AlgVec& xi) -> Eigen::MatrixXd {
        Eigen::MatrixXd H = h.hess_fiber(e, solve(xi));
        return H.inverse();
      });
}

}  // namespace gmtk

#endif  // GMTK_LEGENDRE_HPP
