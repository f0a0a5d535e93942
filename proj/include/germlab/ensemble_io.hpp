#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "germlab/gallery.hpp"
#include "germlab/germ_ensemble.hpp"
#include "germlab/jet_io.hpp"
#include "germlab/matrix_ensemble.hpp"

namespace germlab {

/// Matrix ensemble file:
///   {"dimension": m, "atoms": [{"matrix": [[[re,im],...],...], "prob": p}]}
inline nlohmann::json matrix_ensemble_to_json(const MatrixEnsemble& e) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < e.size(); ++i) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < e.dimension(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < e.dimension(); ++c) {
        const Complex v = e.atom(i)(r, c);
        row.push_back({v.real(), v.imag()});
      }
      rows.push_back(row);
    }
    atoms.push_back({{"matrix", rows}, {"prob", e.probability(i)}});
  }
  return {{"dimension", e.dimension()}, {"atoms", atoms}};
}

inline MatrixEnsemble matrix_ensemble_from_json(const nlohmann::json& j) {
  if (!j.contains("dimension") || !j.contains("atoms"))
    throw std::runtime_error("matrix ensemble: needs dimension and atoms");
  const int m = j.at("dimension").get<int>();
  std::vector<Eigen::MatrixXcd> atoms;
  std::vector<double> probs;
  for (const auto& a : j.at("atoms")) {
    const auto& rows = a.at("matrix");
    if (static_cast<int>(rows.size()) != m)
      throw std::runtime_error("matrix ensemble: wrong row count");
    Eigen::MatrixXcd mat(m, m);
    for (int r = 0; r < m; ++r) {
      if (static_cast<int>(rows[r].size()) != m)
        throw std::runtime_error("matrix ensemble: wrong column count");
      for (int c = 0; c < m; ++c) {
        const auto& v = rows[r][c];
        mat(r, c) = Complex(v.at(0).get<double>(), v.at(1).get<double>());
      }
    }
    atoms.push_back(mat);
    probs.push_back(a.at("prob").get<double>());
  }
  return MatrixEnsemble(m, std::move(atoms), std::move(probs));
}

/// Germ ensemble file:
///   {"dimension": m, "R": r, "degree": d,
///    "atoms": [{"map": <jet schema>, "prob": p}]}
/// or, for generated families,
///   {"generator": {"family": "E1", "lambda1": l, "cap": c}, "R": r}
inline nlohmann::json germ_ensemble_to_json(const GermEnsemble& e) {
  nlohmann::json j;
  j["dimension"] = e.dimension();
  j["R"] = e.escape_radius();
  if (e.has_generator()) {
    j["generator"] = {{"family", "E1"},
                      {"lambda1", e.generator().lambda1},
                      {"cap", e.generator().cap},
                      {"tail_mass", e.generator().tail_mass()}};
    return j;
  }
  j["degree"] = e.atom(0).degree();
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < e.atom_count(); ++i) {
    atoms.push_back({{"map", jet_to_json(e.atom(i))}, {"prob", e.probability(i)}});
  }
  j["atoms"] = atoms;
  return j;
}

inline GermEnsemble germ_ensemble_from_json(const nlohmann::json& j) {
  const double radius = j.contains("R") ? j.at("R").get<double>() : 10.0;
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    if (g.at("family").get<std::string>() != "E1")
      throw std::runtime_error("germ ensemble: unknown generator family");
    IndexedQuadraticFamily family;
    family.lambda1 = g.at("lambda1").get<double>();
    if (g.contains("cap")) family.cap = g.at("cap").get<int>();
    return GermEnsemble(family, radius);
  }
  if (!j.contains("dimension") || !j.contains("atoms"))
    throw std::runtime_error("germ ensemble: needs dimension and atoms");
  const int m = j.at("dimension").get<int>();
  const int degree = j.contains("degree") ? j.at("degree").get<int>() : Jet::kDefaultDegree;
  std::vector<Jet> atoms;
  std::vector<double> probs;
  for (const auto& a : j.at("atoms")) {
    Jet f = jet_from_json(a.at("map"), degree);
    if (f.dimension() != m) throw std::runtime_error("germ ensemble: atom dimension mismatch");
    atoms.push_back(std::move(f));
    probs.push_back(a.at("prob").get<double>());
  }
  return GermEnsemble(m, std::move(atoms), std::move(probs), radius);
}

/// Rotation cocycle file: parameters only; the sample functions are rebuilt
/// from the named family so a run is reproducible from the file.
inline nlohmann::json cocycle_spec_to_json(const CocycleSpec& spec) {
  if (spec.is_iid()) return matrix_ensemble_to_json(spec.ensemble());
  const auto& rot = spec.rotation();
  nlohmann::json j;
  j["rotation"] = {{"family", rot.family}, {"theta", rot.theta}};
  if (rot.levels > 0) j["rotation"]["levels"] = rot.levels;
  j["dimension"] = rot.dimension;
  return j;
}

inline CocycleSpec cocycle_spec_from_json(const nlohmann::json& j) {
  if (j.contains("rotation")) {
    const auto& r = j.at("rotation");
    ExampleParams params;
    params.theta = r.at("theta").get<double>();
    if (r.contains("levels")) params.levels = r.at("levels").get<int>();
    return build_cocycle_example(parse_example_id(r.at("family").get<std::string>()), params);
  }
  return CocycleSpec(matrix_ensemble_from_json(j));
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed json in " + path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace germlab
