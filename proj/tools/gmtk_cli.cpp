// gmtk: simulate systems, run the verification suites, exercise the Legendre
// transform and probe Dirac submanifolds. Exit codes: 0 ok, 1 configuration
// or I/O error, 2 failure during a run (or a failed verification).

#include <CLI11.hpp>
#include <gmtk/integrate.hpp>
#include <gmtk/io.hpp>
#include <gmtk/legendre.hpp>
#include <gmtk/systems.hpp>
#include <gmtk/verify.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace gmtk;
using nlohmann::json;

namespace {

struct Flags {
  std::string system;
  std::string config;
  unsigned seed = 42;
  std::string out;
  std::vector<std::string> tol;
  std::string integrator;
  double dt = 0.0;
  int steps = 0;
  int stride = 0;
  std::string equations;
  std::vector<std::string> suites;
  int samples = 0;
};

/// Everything a command needs, after the config file and the flag overrides.
struct RunConfig {
  std::string command;
  json doc = json::object();  // "system" and "initial"
  IntegratorSpec integrator;
  std::string equations;
  unsigned seed = 42;
  std::string out;
  std::map<std::string, double> tolerances;
  int samples = 0;
  std::set<std::string> suites;
  std::optional<FdOptions> fd;
};

struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void config_fail(const std::string& m) { throw ExitError{1, m}; }

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path + ": expected a number");
  return j.get<double>();
}

int integer_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_fail(path + ": expected an integer");
  return j.get<int>();
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) config_fail(path + ": expected a string");
  return j.get<std::string>();
}

void apply_file(RunConfig& rc, const json& doc) {
  if (!doc.is_object()) config_fail("config: expected a JSON object");
  static const std::set<std::string> keys = {"command", "system",  "initial",    "integrator", "equations", "seed",
                                             "out",     "samples", "tolerances", "suites",     "fd"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!keys.count(it.key())) config_fail("config." + it.key() + ": unknown field");
  if (doc.contains("system")) rc.doc["system"] = doc["system"];
  if (doc.contains("initial")) rc.doc["initial"] = doc["initial"];
  if (doc.contains("integrator")) {
    const json& in = doc["integrator"];
    if (!in.is_object()) config_fail("integrator: expected an object");
    for (auto it = in.begin(); it != in.end(); ++it) {
      const std::string k = it.key(), path = "integrator." + k;
      if (k == "method") {
        try {
          rc.integrator.method = method_from_name(string_at(*it, path));
        } catch (const StructuralError& e) {
          config_fail(path + ": " + e.what());
        }
      } else if (k == "dt") rc.integrator.dt = number_at(*it, path);
      else if (k == "steps") rc.integrator.steps = integer_at(*it, path);
      else if (k == "stride") rc.integrator.stride = integer_at(*it, path);
      else config_fail(path + ": unknown field");
    }
  }
  if (doc.contains("equations")) rc.equations = string_at(doc["equations"], "equations");
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) config_fail("seed: expected a non-negative integer");
    rc.seed = s.get<unsigned>();
  }
  if (doc.contains("out")) rc.out = string_at(doc["out"], "out");
  if (doc.contains("samples")) rc.samples = integer_at(doc["samples"], "samples");
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) config_fail("tolerances: expected an object of name: value");
    for (auto it = t.begin(); it != t.end(); ++it) rc.tolerances[it.key()] = number_at(*it, "tolerances." + it.key());
  }
  if (doc.contains("suites")) {
    const json& s = doc["suites"];
    if (!s.is_array()) config_fail("suites: expected an array of names");
    for (std::size_t i = 0; i < s.size(); ++i) rc.suites.insert(string_at(s[i], "suites[" + std::to_string(i) + "]"));
  }
  if (doc.contains("fd")) {
    const json& f = doc["fd"];
    if (!f.is_object()) config_fail("fd: expected an object");
    FdOptions o;
    for (auto it = f.begin(); it != f.end(); ++it) {
      if (it.key() == "step") {
        o.step = number_at(*it, "fd.step");
        if (!(o.step > 0.0)) config_fail("fd.step: must be > 0");
      } else if (it.key() == "richardson") {
        if (!it->is_boolean()) config_fail("fd.richardson: expected true or false");
        o.richardson = it->get<bool>();
      } else {
        config_fail("fd." + it.key() + ": unknown field");
      }
    }
    rc.fd = o;
  }
}

RunConfig build_config(const std::string& command, const Flags& f, const CLI::App& sub) {
  RunConfig rc;
  rc.command = command;
  if (!f.config.empty()) {
    try {
      apply_file(rc, io::read_json_file(f.config));
    } catch (const ConfigError& e) {
      config_fail(e.what());
    }
  }
  auto given = [&](const char* name) {
    const CLI::Option* o = sub.get_option_no_throw(name);
    return o && o->count() > 0;
  };
  if (given("--system")) rc.doc["system"] = f.system;
  if (given("--seed")) rc.seed = f.seed;
  if (given("--out")) rc.out = f.out;
  if (given("--samples")) rc.samples = f.samples;
  if (given("--equations")) rc.equations = f.equations;
  if (given("--suite"))
    for (const auto& s : f.suites) rc.suites.insert(s);
  if (given("--integrator")) {
    try {
      rc.integrator.method = method_from_name(f.integrator);
    } catch (const StructuralError& e) {
      config_fail(std::string("--integrator: ") + e.what());
    }
  }
  if (given("--dt")) rc.integrator.dt = f.dt;
  if (given("--steps")) rc.integrator.steps = f.steps;
  if (given("--stride")) rc.integrator.stride = f.stride;
  for (const auto& t : f.tol) {
    auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) config_fail("--tol: expected name=value, got '" + t + "'");
    const std::string v = t.substr(eq + 1);
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(x)) config_fail("--tol: bad value in '" + t + "'");
    rc.tolerances[t.substr(0, eq)] = x;
  }
  if (rc.samples < 0) config_fail("samples: must be positive");
  return rc;
}

ConfigResult resolve_system(const RunConfig& rc) {
  if (!rc.doc.contains("system")) config_fail("system: required (use --system or --config)");
  ConfigResult r;
  try {
    r = from_config(rc.doc);
  } catch (const ConfigError& e) {
    config_fail(e.what());
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (rc.fd) {
    if (r.spec.lagrangian) r.spec.lagrangian->fd = *rc.fd;
    if (r.spec.hamiltonian) r.spec.hamiltonian->fd = *rc.fd;
  }
  return r;
}

double tolerance(const RunConfig& rc, const std::string& name, double dflt) {
  auto it = rc.tolerances.find(name);
  return it == rc.tolerances.end() ? dflt : it->second;
}

/// Output stream for --out; empty or "-" is standard output.
struct Sink {
  std::ofstream file;
  bool to_stdout = true;
  std::ostream& os() { return to_stdout ? std::cout : file; }
};

std::unique_ptr<Sink> open_sink(const std::string& path) {
  auto s = std::make_unique<Sink>();
  if (path.empty() || path == "-") return s;
  s->to_stdout = false;
  s->file.open(path);
  if (!s->file) config_fail(path + ": cannot open for writing");
  return s;
}

void write_json(const RunConfig& rc, const json& j) {
  auto sink = open_sink(rc.out);
  sink->os() << j.dump(2) << "\n";
  sink->os().flush();
  if (!sink->os()) config_fail(rc.out + ": write failed");
}

// -- commands

int cmd_simulate(const RunConfig& rc) {
  try {
    rc.integrator.validate();
  } catch (const StructuralError& e) {
    config_fail(e.what());
  }
  SystemSpec s = resolve_system(rc).spec;
  const GroupModel& G = s.model;
  std::string eq = rc.equations.empty() ? (s.hamiltonian ? "hamilton" : "el") : rc.equations;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) config_fail("equations '" + eq + "': " + what);
  };
  if (eq == "hamilton") need(s.hamiltonian && s.initial.mu, "needs a Hamiltonian and an initial mu");
  else if (eq == "lie_poisson") need(s.hamiltonian && s.hamiltonian->reduced && s.initial.mu, "needs a reduced Hamiltonian and an initial mu");
  else if (eq == "el") need(s.lagrangian && s.initial.xi, "needs a Lagrangian and an initial xi");
  else if (eq == "euler_poincare") need(s.lagrangian && s.lagrangian->reduced && s.initial.xi, "needs a reduced Lagrangian and an initial xi");
  else config_fail("equations: expected hamilton, lie_poisson, el or euler_poincare, got '" + eq + "'");

  auto sink = open_sink(rc.out);
  TrajectoryRecord rec;
  try {
    if (eq == "hamilton") rec = integrate_hamilton(*s.hamiltonian, {s.initial.g, *s.initial.mu}, rc.integrator);
    else if (eq == "lie_poisson") rec = integrate_lie_poisson(*s.hamiltonian, *s.initial.mu, rc.integrator);
    else if (eq == "el") rec = integrate_trivialized_el(*s.lagrangian, s.initial.g, *s.initial.xi, rc.integrator);
    else rec = integrate_euler_poincare(*s.lagrangian, *s.initial.xi, rc.integrator);
  } catch (const DegenerateLagrangian& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  write_csv(sink->os(), G, rec);
  sink->os().flush();
  if (!sink->os()) config_fail(rc.out + ": write failed");

  std::ostream& summary = sink->to_stdout ? std::cerr : std::cout;
  std::vector<double> cas;
  for (const auto& c : rec.casimirs)
    if (!c.empty()) cas.push_back(c[0]);
  double cmax = 0.0;
  for (double c : rec.constraint_residual) cmax = std::max(cmax, c);
  summary << "system=" << s.name << " equations=" << eq << " integrator=" << method_name(rc.integrator.method)
          << " rows=" << rec.size() << " t_final=" << format17(rec.times.empty() ? 0.0 : rec.times.back())
          << " energy_drift=" << format17(rec.energy.empty() ? 0.0 : drift(rec.energy, true))
          << " casimir_drift=" << (cas.empty() ? std::string("none") : format17(drift(cas, true)))
          << " max_constraint_residual=" << format17(cmax) << " status=" << (rec.failed ? "failed" : "ok") << "\n";
  if (rec.failed) {
    std::cerr << "error: " << rec.error << "\n";
    return 2;
  }
  return 0;
}

int cmd_verify(const RunConfig& rc) {
  VerifyOptions opt;
  opt.seed = rc.seed;
  opt.samples = rc.samples;
  opt.tolerances = rc.tolerances;
  opt.suites = rc.suites;
  for (const auto& s : opt.suites) {
    auto names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) config_fail("--suite: unknown suite '" + s + "'");
  }
  auto report = run_verification(opt);
  json j = io::to_json(report);
  j["seed"] = rc.seed;
  write_json(rc, j);
  return all_pass(report) ? 0 : 2;
}

/// L frozen at g as a reduced Lagrangian on the fiber.
LagrangianField frozen(const LagrangianField& L, const GroupElement& g) {
  if (L.reduced) return L;
  LagrangianField l = L;
  l.reduced = true;
  l.eval = [L, g](const GroupElement&, const AlgVec& x) { return L.value(g, x); };
  l.fiber_grad = [L, g](const GroupElement&, const AlgVec& x) { return L.d_fiber(g, x); };
  l.fiber_hess = [L, g](const GroupElement&, const AlgVec& x) { return L.hess_fiber(g, x); };
  l.group_grad = {};
  return l;
}

int cmd_legendre(const RunConfig& rc) {
  SystemSpec s = resolve_system(rc).spec;
  if (!s.lagrangian) config_fail("legendre: the system has no Lagrangian");
  const GroupModel& G = s.model;
  const GroupElement e = G.identity();
  const int n = rc.samples > 0 ? rc.samples : 100;
  std::mt19937_64 rng(rc.seed);
  LagrangianField l = frozen(*s.lagrangian, s.initial.g);

  bool rank_pass = true;
  MorseFamily E = s.lagrangian->reduced ? make_reduced_l2h(*s.lagrangian) : make_EL2H(*s.lagrangian);
  for (int k = 0; k < std::min(n, 20); ++k) {
    MorseBase b{std::nullopt, G.random_dual(rng).v};
    if (!s.lagrangian->reduced) b.g = G.random_element(rng);
    rank_pass = rank_pass && rank_check(E, b, G.random_alg(rng).v).pass;
  }

  json j;
  j["system"] = s.name;
  j["samples"] = n;
  j["rank_check_pass"] = rank_pass;
  try {
    HamiltonianField h = legendre_transform(l);
    LagrangianField back = legendre_inverse(h);
    double err = 0.0;
    for (int k = 0; k < n; ++k) {
      AlgVec xi = G.random_alg(rng);
      err = std::max(err, std::abs(back.value(e, xi) - l.value(e, xi)));
      err = std::max(err, (back.d_fiber(e, xi) - l.d_fiber(e, xi)).max_abs());
    }
    j["degenerate"] = false;
    j["max_roundtrip_error"] = io::number(err);
    double tol = tolerance(rc, "roundtrip", 1e-9);
    j["roundtrip_tolerance"] = tol;
    j["roundtrip_pass"] = err <= tol;
    if (s.hamiltonian) j["pair_mismatch"] = io::number(legendre_pair_mismatch(*s.lagrangian, *s.hamiltonian));
  } catch (const DegenerateLagrangian& d) {
    j["degenerate"] = true;
    j["max_roundtrip_error"] = nullptr;
    j["hessian_rank"] = d.rank;
  } catch (const EvaluationError& ev) {
    j["degenerate"] = false;
    j["max_roundtrip_error"] = nullptr;
    j["error"] = ev.what();
  }
  write_json(rc, j);
  return 0;
}

int cmd_submanifold(const RunConfig& rc) {
  SystemSpec s = resolve_system(rc).spec;
  const GroupModel& G = s.model;
  const int n = rc.samples > 0 ? rc.samples : 50;
  std::mt19937_64 rng(rc.seed);
  const double tm = tolerance(rc, "membership", 1e-8), ti = tolerance(rc, "isotropy", 1e-6),
               tc = tolerance(rc, "consistency", 1e-9), td = tolerance(rc, "dirac", 1e-8);
  json j;
  j["system"] = s.name;
  j["samples"] = n;
  j["tolerances"] = {{"membership", tm}, {"isotropy", ti}, {"consistency", tc}, {"dirac", td}};
  auto section = [&](double mem, double iso, double con) {
    return json{{"max_membership", io::number(mem)},
                {"max_isotropy", io::number(iso)},
                {"max_consistency", io::number(con)},
                {"pass", mem <= tm && iso <= ti && con <= tc}};
  };
  try {
    if (s.lagrangian) {
      const LagrangianField& L = *s.lagrangian;
      double mem = 0.0, iso = 0.0, con = 0.0;
      for (int k = 0; k < n; ++k) {
        GroupElement g = G.random_element(rng);
        AlgVec xi = G.random_alg(rng);
        // the point reached through dL, tested against the defining equations of S
        mem = std::max(mem, membership_S(L, sigma_inv(G, lagrangian_differential(L, g, xi))));
        iso = std::max(iso, isotropy_S(L, g, xi));
        con = std::max(con, sigma_consistency(L, g, xi));
      }
      j["S"] = section(mem, iso, con);
      if (s.initial.xi) j["S_example"] = io::to_json(G, submanifold_S(L, s.initial.g, *s.initial.xi));
    } else {
      j["S"] = nullptr;
    }
    if (s.hamiltonian) {
      const HamiltonianField& H = *s.hamiltonian;
      double mem = 0.0, iso = 0.0, con = 0.0;
      for (int k = 0; k < n; ++k) {
        PhaseState st{G.random_element(rng), G.random_dual(rng)};
        mem = std::max(mem, membership_Sprime(H, omega_sharp(G, hamiltonian_differential(H, st))));
        iso = std::max(iso, isotropy_Sprime(H, st.g, st.mu));
        con = std::max(con, omega_flat_consistency(H, st));
      }
      j["Sprime"] = section(mem, iso, con);
      if (s.initial.mu) j["Sprime_example"] = io::to_json(G, submanifold_Sprime(H, {s.initial.g, *s.initial.mu}));
    } else {
      j["Sprime"] = nullptr;
    }
    json red = nullptr;
    if (s.lagrangian && s.lagrangian->reduced) {
      double tau = 0.0;
      for (int k = 0; k < n; ++k)
        tau = std::max(tau, dirac_identity_tau(*s.lagrangian, lagrange_dirac(*s.lagrangian, G.random_alg(rng))));
      red = json::object();
      red["max_dirac_tau"] = io::number(tau);
      if (s.initial.xi) red["example"] = io::to_json(lagrange_dirac(*s.lagrangian, *s.initial.xi));
    }
    if (s.hamiltonian && s.hamiltonian->reduced) {
      double pi = 0.0;
      for (int k = 0; k < n; ++k)
        pi = std::max(pi, dirac_identity_pi(*s.hamiltonian, hamilton_dirac(*s.hamiltonian, G.random_dual(rng))));
      if (red.is_null()) red = json::object();
      red["max_dirac_pi"] = io::number(pi);
    }
    if (!red.is_null()) {
      double w = std::max(red.value("max_dirac_tau", 0.0), red.value("max_dirac_pi", 0.0));
      red["pass"] = w <= td;
    }
    j["reduced"] = red;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  write_json(rc, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric mechanics toolkit on the trivialized and reduced Tulczyjew triplets"};
  app.require_subcommand(1);
  Flags f;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"simulate", "integrate a system and write a CSV trajectory"},
                      {"verify", "run the property suites and write a JSON report"},
                      {"legendre", "Legendre transform round trip and rank checks"},
                      {"submanifold", "membership and isotropy of the Dirac submanifolds"}};
  std::map<std::string, CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--system", f.system, "builtin system name");
    sc->add_option("--config", f.config, "JSON run configuration; flags override it");
    sc->add_option("--seed", f.seed, "random seed (default 42)");
    sc->add_option("--out", f.out, "output file (default: standard output)");
    sc->add_option("--tol", f.tol, "tolerance override name=value (repeatable)")->allow_extra_args(false);
    sc->add_option("--samples", f.samples, "sample count override");
    if (std::string(s.name) == "simulate") {
      sc->add_option("--integrator", f.integrator, "lie_euler, rkmk4 or rk4_linear");
      sc->add_option("--dt", f.dt, "time step");
      sc->add_option("--steps", f.steps, "number of steps");
      sc->add_option("--stride", f.stride, "keep every stride-th state");
      sc->add_option("--equations", f.equations, "hamilton, lie_poisson, el or euler_poincare");
    }
    if (std::string(s.name) == "verify")
      sc->add_option("--suite", f.suites, "run only this suite (repeatable)")->allow_extra_args(false);
    apps[s.name] = sc;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (std::string p = fd_step_env_problem(); !p.empty()) config_fail(p);
    for (const auto& [name, sc] : apps) {
      if (!sc->parsed()) continue;
      RunConfig rc = build_config(name, f, *sc);
      if (name == "simulate") return cmd_simulate(rc);
      if (name == "verify") return cmd_verify(rc);
      if (name == "legendre") return cmd_legendre(rc);
      return cmd_submanifold(rc);
    }
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
