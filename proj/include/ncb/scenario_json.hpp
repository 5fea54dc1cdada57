#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ncb/quantum.hpp"

namespace ncb {

using Json = nlohmann::json;

/// Matrix as rows of [re, im] pairs.
inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, std::size_t dim, const std::string& what) {
  const auto fail = [&](const std::string& msg) { throw FormatError(what + ": " + msg); };
  if (!j.is_array() || j.size() != dim) fail("expected " + std::to_string(dim) + " rows");
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != dim) fail("row " + std::to_string(r) + " has wrong length");
    for (Eigen::Index c = 0; c < d; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        fail("entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not [re, im]");
      }
    }
  }
  return m;
}

inline Json scenario_to_json(const Scenario& sc) {
  Json j;
  j["dim"] = sc.dim;
  j["preparations"] = Json::array();
  for (const auto& s : sc.preparations) j["preparations"].push_back({{"name", s.name}, {"matrix", matrix_to_json(s.op.matrix())}});
  j["measurements"] = Json::array();
  for (const auto& m : sc.measurements) {
    Json effects = Json::array();
    Json names = Json::array();
    for (const auto& e : m.effects) {
      effects.push_back(matrix_to_json(e.op.matrix()));
      names.push_back(e.name);
    }
    j["measurements"].push_back({{"name", m.name}, {"effects", effects}, {"effect_names", names}});
  }
  j["metadata"] = Json::object();
  for (const auto& [k, v] : sc.metadata) j["metadata"][k] = v;
  return j;
}

/// Parses a scenario document. Structural problems raise FormatError; physical
/// validity (positivity, normalization) is left to validate().
inline Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("scenario: top level must be an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
    throw FormatError("scenario: 'dim' must be a positive integer");
  Scenario sc;
  sc.dim = j["dim"].get<std::size_t>();
  if (!j.contains("preparations") || !j["preparations"].is_array()) throw FormatError("scenario: missing 'preparations' array");
  if (!j.contains("measurements") || !j["measurements"].is_array()) throw FormatError("scenario: missing 'measurements' array");
  std::size_t idx = 0;
  for (const auto& p : j["preparations"]) {
    const std::string name = p.value("name", "prep" + std::to_string(idx));
    if (!p.contains("matrix")) throw FormatError("preparation '" + name + "' has no 'matrix'");
    sc.preparations.push_back({HermitianOperator(matrix_from_json(p["matrix"], sc.dim, name)), name});
    ++idx;
  }
  idx = 0;
  for (const auto& m : j["measurements"]) {
    Povm povm{{}, m.value("name", "meas" + std::to_string(idx))};
    if (!m.contains("effects") || !m["effects"].is_array()) throw FormatError("measurement '" + povm.name + "' has no 'effects' array");
    const Json names = m.value("effect_names", Json::array());
    std::size_t k = 0;
    for (const auto& e : m["effects"]) {
      std::string ename = (names.is_array() && k < names.size() && names[k].is_string())
                              ? names[k].get<std::string>()
                              : povm.name + "[" + std::to_string(k) + "]";
      const Json& mat = (e.is_object() && e.contains("matrix")) ? e["matrix"] : e;
      if (e.is_object() && e.contains("name")) ename = e["name"].get<std::string>();
      povm.effects.push_back({HermitianOperator(matrix_from_json(mat, sc.dim, ename)), ename});
      ++k;
    }
    sc.measurements.push_back(std::move(povm));
    ++idx;
  }
  if (j.contains("metadata") && j["metadata"].is_object())
    for (const auto& [k, v] : j["metadata"].items()) sc.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scenario file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write scenario file '" + path + "'");
  out << scenario_to_json(sc).dump(1) << '\n';
}

}  // namespace ncb
