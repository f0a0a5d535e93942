#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace germlab {

/// Exponent vector of a monomial z_1^{e_1} ... z_m^{e_m}.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

  int dimension() const { return static_cast<int>(exponents.size()); }

  int degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
  }

  bool operator==(const MultiIndex& other) const {
    return exponents == other.exponents;
  }
};

/// Graded lexicographic order: total degree first, then lex on exponents.
/// This is the canonical storage order for jet coefficients.
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  return a.exponents < b.exponents;
}

}  // namespace germlab
