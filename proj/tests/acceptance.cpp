// One line per acceptance criterion. Each criterion is a list of verification
// properties with the threshold and sample count it demands; a property whose
// tolerance is looser or whose sample count is smaller than demanded fails.

#include <gmtk/verify.hpp>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Requirement {
  std::string suite;
  std::string prefix;  // property name, or name up to the "[" tag
  double threshold;
  int min_samples;
  int min_matches;     // how many tagged variants must be present
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Requirement> reqs;
};

bool matches(const gmtk::PropertyResult& r, const Requirement& q) {
  if (r.suite != q.suite) return false;
  return r.name == q.prefix || r.name.rfind(q.prefix + "[", 0) == 0;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  gmtk::VerifyOptions opt;  // seed 42, every suite, default tolerances
  const std::vector<gmtk::PropertyResult> results = gmtk::run_verification(opt);

  const std::vector<Criterion> criteria = {
      {1, "algebraic dualities",
       {{"algebra", "ad_star_duality", 1e-10, 100, 3},
        {"group", "Ad_star_duality", 1e-10, 100, 3},
        {"group", "Ad_star_derivative", 1e-6, 100, 3}}},
      {2, "triplet structure",
       {{"triplet", "omega_is_d_theta1", 1e-6, 50, 3},
        {"triplet", "omega_is_d_theta2", 1e-6, 50, 3},
        {"triplet", "theta_difference_exact", 1e-8, 50, 3},
        {"triplet", "abelian_classical", 1e-12, 50, 1}}},
      {3, "submanifold representations",
       {{"dynamics", "isotropy_S", 1e-6, 10, 4},
        {"dynamics", "isotropy_Sprime", 1e-6, 10, 4},
        {"dynamics", "sigma_consistency", 1e-9, 10, 4},
        {"dynamics", "omega_flat_consistency", 1e-9, 10, 4},
        {"reduction", "dirac_tau", 1e-8, 20, 2},
        {"reduction", "dirac_pi", 1e-8, 20, 2}}},
      {4, "reduction commutation",
       {{"reduction", "red_diff_kappa", 1e-12, 200, 3},
        {"reduction", "red_diff_omega", 1e-12, 200, 3},
        {"reduction", "omega_is_d_chi1", 1e-12, 50, 3},
        {"reduction", "omega_is_d_chi2", 1e-12, 50, 3}}},
      {5, "Legendre transformation",
       {{"legendre", "roundtrip", 1e-9, 100, 1},
        {"legendre", "morse_omega_hat", 1e-8, 10, 1},
        {"legendre", "rank_check", 0.0, 10, 1},
        {"legendre", "degenerate_refused", 0.0, 10, 1}}},
      {6, "dynamics equivalence",
       {{"integrate", "ep_matches_lp", 1e-6, 10001, 1},
        {"integrate", "exact_reduction", 0.0, 1001, 1}}},
      {7, "conservation at desk scale",
       {{"integrate", "casimir_drift", 1e-6, 10001, 1},
        {"integrate", "energy_drift", 1e-6, 10001, 1},
        {"integrate", "so3_constraint", 1e-9, 10001, 1},
        {"integrate", "rkmk4_order", 0.3, 3, 1}}},
      {8, "classical baseline",
       {{"integrate", "classical_rk4_baseline", 1e-12, 1001, 1}}},
  };

  bool all_ok = true;
  for (const Criterion& c : criteria) {
    bool ok = true;
    std::string detail;
    for (const Requirement& q : c.reqs) {
      int found = 0;
      double worst = 0.0;
      for (const auto& r : results) {
        if (!matches(r, q)) continue;
        ++found;
        const bool good = r.pass && r.tolerance <= q.threshold && r.samples >= q.min_samples;
        if (!good) {
          ok = false;
          detail += " [" + r.name + " violation=" + std::to_string(r.max_violation) +
                    " tol=" + std::to_string(r.tolerance) + " samples=" + std::to_string(r.samples) + "]";
        }
        if (!(r.max_violation <= worst)) worst = r.max_violation;
      }
      if (found < q.min_matches) {
        ok = false;
        detail += " [" + q.prefix + " missing]";
      }
      char buf[128];
      std::snprintf(buf, sizeof buf, " %s=%.2e", q.prefix.c_str(), worst);
      detail += buf;
    }
    all_ok = all_ok && ok;
    std::printf("criterion %d %-30s %s%s\n", c.id, c.title.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  }

  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("elapsed %.2fs, %s\n", secs, all_ok ? "all criteria pass" : "some criteria FAIL");
  return all_ok ? 0 : 1;
}
