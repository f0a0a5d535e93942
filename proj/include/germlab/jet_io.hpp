#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "germlab/jet.hpp"

namespace germlab {

/// Serialized polynomial map: a list of m components, each a list of
/// records {"exponents": [e1,...,em], "coeff": [re, im]}.
inline nlohmann::json jet_to_json(const Jet& f) {
  nlohmann::json components = nlohmann::json::array();
  for (int c = 0; c < f.dimension(); ++c) {
    nlohmann::json records = nlohmann::json::array();
    for (std::size_t k = 0; k < f.basis().size(); ++k) {
      const Complex v = f.component(c).coefficient(k);
      if (v == Complex(0, 0)) continue;
      records.push_back({{"exponents", f.basis().monomial(k).exponents},
                         {"coeff", {v.real(), v.imag()}}});
    }
    components.push_back(records);
  }
  return components;
}

inline Jet jet_from_json(const nlohmann::json& j, int degree = Jet::kDefaultDegree) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("jet: expected nonempty array of components");
  const int m = static_cast<int>(j.size());
  Jet f(m, degree);
  for (int c = 0; c < m; ++c) {
    if (!j[c].is_array())
      throw std::invalid_argument("jet: component must be an array of records");
    std::set<std::vector<int>> seen;
    for (const auto& rec : j[c]) {
      if (!rec.contains("exponents") || !rec.contains("coeff"))
        throw std::invalid_argument("jet: record needs exponents and coeff");
      std::vector<int> e = rec.at("exponents").get<std::vector<int>>();
      if (static_cast<int>(e.size()) != m)
        throw std::invalid_argument("jet: exponent vector has wrong length");
      for (int v : e) {
        if (v < 0) throw std::invalid_argument("jet: negative exponent");
      }
      MultiIndex idx(e);
      if (idx.degree() > degree)
        throw std::invalid_argument("jet: monomial degree above truncation");
      if (!seen.insert(e).second)
        throw std::invalid_argument("jet: duplicate monomial");
      const auto& cf = rec.at("coeff");
      if (!cf.is_array() || cf.size() != 2)
        throw std::invalid_argument("jet: coeff must be [re, im]");
      f.set_coefficient(c, idx, Complex(cf[0].get<double>(), cf[1].get<double>()));
    }
  }
  return f;
}

/// Parse a serialized polynomial map from text.
inline Jet jet_parse(const std::string& text, int degree = Jet::kDefaultDegree) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("jet: malformed text: ") + e.what());
  }
  return jet_from_json(j, degree);
}

}  // namespace germlab
