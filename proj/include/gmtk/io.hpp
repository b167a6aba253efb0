#ifndef GMTK_IO_HPP
#define GMTK_IO_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "group.hpp"
#include "reduction.hpp"
#include "triplet.hpp"
#include "verify.hpp"

namespace gmtk::io {

using nlohmann::json;

inline json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Matrix groups as row lists, R^n as a flat vector.
inline json to_json(const GroupModel& G, const GroupElement& g) {
  if (!G.is_matrix_group()) return to_json(g.vec());
  json rows = json::array();
  for (Eigen::Index i = 0; i < g.mat.rows(); ++i) rows.push_back(to_json(Eigen::VectorXd(g.mat.row(i).transpose())));
  return rows;
}

inline json to_json(const GroupModel& G, const TripletPoint& p) {
  return {{"g", to_json(G, p.g)}, {"mu", to_json(p.mu.v)}, {"xi", to_json(p.xi.v)}, {"nu", to_json(p.nu.v)}};
}

inline json to_json(const ReducedPoint& z) {
  return {{"lam", to_json(z.lam.v)}, {"mu", to_json(z.mu.v)}, {"xi", to_json(z.xi.v)}};
}

inline json to_json(const PropertyResult& r) {
  return {{"suite", r.suite},
          {"name", r.name},
          {"samples", r.samples},
          {"max_violation", r.max_violation},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

/// Non-finite doubles become strings so the document stays valid JSON.
inline json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline json to_json(const std::vector<PropertyResult>& rs) {
  json props = json::array();
  for (const auto& r : rs) {
    json j = to_json(r);
    j["max_violation"] = number(r.max_violation);
    props.push_back(j);
  }
  return {{"all_pass", all_pass(rs)}, {"properties", props}};
}

/// Reads {"name", "dim", "c": [[i, j, k, value], ...]}; unlisted entries are zero
/// and antisymmetric partners are filled in.
inline StructureAlgebra algebra_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("algebra: expected an object");
  for (const char* key : {"name", "dim", "c"})
    if (!j.contains(key)) throw ConfigError(std::string("algebra.") + key + ": required");
  if (!j["name"].is_string()) throw ConfigError("algebra.name: expected a string");
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
    throw ConfigError("algebra.dim: expected a positive integer");
  if (!j["c"].is_array()) throw ConfigError("algebra.c: expected an array of [i, j, k, value]");
  const int n = j["dim"].get<int>();
  std::vector<std::tuple<int, int, int, double>> entries;
  for (std::size_t e = 0; e < j["c"].size(); ++e) {
    const json& t = j["c"][e];
    const std::string path = "algebra.c[" + std::to_string(e) + "]";
    if (!t.is_array() || t.size() != 4) throw ConfigError(path + ": expected [i, j, k, value]");
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      if (!t[a].is_number_integer()) throw ConfigError(path + ": indices must be integers");
      idx[a] = t[a].get<int>();
      if (idx[a] < 0 || idx[a] >= n) throw ConfigError(path + ": index out of range for dim " + std::to_string(n));
    }
    if (!t[3].is_number()) throw ConfigError(path + ": value must be a number");
    entries.emplace_back(idx[0], idx[1], idx[2], t[3].get<double>());
  }
  try {
    return StructureAlgebra::from_entries(j["name"].get<std::string>(), n, entries);
  } catch (const StructuralError& e) {
    throw ConfigError(std::string("algebra.c: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace gmtk::io

#endif  // GMTK_IO_HPP
