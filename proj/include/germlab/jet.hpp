#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "germlab/multi_index.hpp"

namespace germlab {

using Complex = std::complex<double>;

/// Enumeration of all monomials of a fixed dimension up to a truncation
/// degree, in graded lexicographic order, with a precomputed product table.
/// Shared between every jet of the same (dimension, degree); immutable after
/// construction.
class MonomialBasis {
 public:
  MonomialBasis(int dimension, int degree)
      : dimension_(dimension), degree_(degree) {
    if (dimension < 1) throw std::invalid_argument("jet dimension must be >= 1");
    if (degree < 1) throw std::invalid_argument("jet degree must be >= 1");
    std::vector<int> cur(dimension, 0);
    enumerate(cur, 0, degree);
    std::sort(monomials_.begin(), monomials_.end(), graded_lex_less);
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
      position_[monomials_[i].exponents] = i;
    }
    // product_[i * size + j] = position of monomial i+j, or -1 above degree.
    const std::size_t n = monomials_.size();
    product_.assign(n * n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (monomials_[i].degree() + monomials_[j].degree() > degree) continue;
        std::vector<int> sum(dimension);
        for (int k = 0; k < dimension; ++k) {
          sum[k] = monomials_[i].exponents[k] + monomials_[j].exponents[k];
        }
        product_[i * n + j] = static_cast<long>(position_.at(sum));
      }
    }
  }

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  std::size_t size() const { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }

  /// Position of an exponent vector, or -1 if it is not in the basis.
  long position(const std::vector<int>& exponents) const {
    auto it = position_.find(exponents);
    return it == position_.end() ? -1 : static_cast<long>(it->second);
  }

  long product_position(std::size_t i, std::size_t j) const {
    return product_[i * monomials_.size() + j];
  }

  static std::shared_ptr<const MonomialBasis> get(int dimension, int degree) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>>
        cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dimension, degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto basis = std::make_shared<const MonomialBasis>(dimension, degree);
    cache[key] = basis;
    return basis;
  }

 private:
  void enumerate(std::vector<int>& cur, int pos, int remaining) {
    if (pos == dimension_) {
      monomials_.emplace_back(cur);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[pos] = e;
      enumerate(cur, pos + 1, remaining - e);
    }
    cur[pos] = 0;
  }

  int dimension_;
  int degree_;
  std::vector<MultiIndex> monomials_;
  std::map<std::vector<int>, std::size_t> position_;
  std::vector<long> product_;
};

/// One component of a jet: a truncated power series stored densely over the
/// shared monomial basis.
class Series {
 public:
  explicit Series(std::shared_ptr<const MonomialBasis> basis)
      : basis_(std::move(basis)), coeffs_(basis_->size(), Complex(0, 0)) {}

  const MonomialBasis& basis() const { return *basis_; }
  std::shared_ptr<const MonomialBasis> basis_ptr() const { return basis_; }

  Complex coefficient(std::size_t i) const { return coeffs_[i]; }
  void set_coefficient(std::size_t i, Complex c) { coeffs_[i] = c; }
  void add_coefficient(std::size_t i, Complex c) { coeffs_[i] += c; }

  Series& operator+=(const Series& other) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
  }

  Series& operator*=(Complex c) {
    for (auto& v : coeffs_) v *= c;
    return *this;
  }

  /// Truncated product: terms above the basis degree are dropped.
  Series multiply(const Series& other) const {
    Series out(basis_);
    const std::size_t n = coeffs_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Complex a = coeffs_[i];
      if (a == Complex(0, 0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const Complex b = other.coeffs_[j];
        if (b == Complex(0, 0)) continue;
        const long p = basis_->product_position(i, j);
        if (p >= 0) out.coeffs_[static_cast<std::size_t>(p)] += a * b;
      }
    }
    return out;
  }

  Complex evaluate(const Eigen::VectorXcd& z) const {
    const int m = basis_->dimension();
    const int d = basis_->degree();
    // Power table z_i^e for e = 0..d, in reused thread-local scratch (orbit
    // loops call this tens of millions of times).
    thread_local std::vector<Complex> pw;
    pw.assign(static_cast<std::size_t>(m) * (d + 1), Complex(1, 0));
    for (int i = 0; i < m; ++i) {
      for (int e = 1; e <= d; ++e) {
        pw[static_cast<std::size_t>(i * (d + 1) + e)] =
            pw[static_cast<std::size_t>(i * (d + 1) + e - 1)] * z[i];
      }
    }
    Complex sum(0, 0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (coeffs_[k] == Complex(0, 0)) continue;
      Complex term = coeffs_[k];
      const auto& e = basis_->monomial(k).exponents;
      for (int i = 0; i < m; ++i) {
        if (e[i] != 0) term *= pw[static_cast<std::size_t>(i * (d + 1) + e[i])];
      }
      sum += term;
    }
    return sum;
  }

  /// True when only degree-1 monomials carry nonzero coefficients.
  bool is_linear() const {
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (coeffs_[k] != Complex(0, 0) && basis_->monomial(k).degree() != 1) return false;
    }
    return true;
  }

  /// Sum of coefficient magnitudes per total degree, used for remainder
  /// bounds; index d holds sum over |alpha| = d.
  std::vector<double> degree_coefficient_norms() const {
    std::vector<double> norms(basis_->degree() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      norms[basis_->monomial(k).degree()] += std::abs(coeffs_[k]);
    }
    return norms;
  }

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  std::vector<Complex> coeffs_;
};

/// Truncated polynomial map of C^m into itself: the computational stand-in
/// for a holomorphic germ. Immutable by convention after construction; all
/// operations below return new jets.
class Jet {
 public:
  static constexpr int kDefaultDegree = 8;

  Jet(int dimension, int degree)
      : basis_(MonomialBasis::get(dimension, degree)),
        components_(static_cast<std::size_t>(dimension), Series(basis_)) {}

  static Jet identity(int dimension, int degree = kDefaultDegree) {
    Jet j(dimension, degree);
    std::vector<int> e(dimension, 0);
    for (int i = 0; i < dimension; ++i) {
      e[i] = 1;
      j.set_coefficient(i, MultiIndex(e), Complex(1, 0));
      e[i] = 0;
    }
    return j;
  }

  /// Linear map as a jet: component c is sum_i M(c,i) z_i.
  static Jet from_linear(const Eigen::MatrixXcd& M, int degree = kDefaultDegree) {
    if (M.rows() != M.cols()) throw std::invalid_argument("linear part must be square");
    const int m = static_cast<int>(M.rows());
    Jet j(m, degree);
    std::vector<int> e(m, 0);
    for (int c = 0; c < m; ++c) {
      for (int i = 0; i < m; ++i) {
        if (M(c, i) == Complex(0, 0)) continue;
        e[i] = 1;
        j.set_coefficient(c, MultiIndex(e), M(c, i));
        e[i] = 0;
      }
    }
    return j;
  }

  int dimension() const { return basis_->dimension(); }
  int degree() const { return basis_->degree(); }
  const MonomialBasis& basis() const { return *basis_; }
  const Series& component(int c) const { return components_[static_cast<std::size_t>(c)]; }
  Series& component(int c) { return components_[static_cast<std::size_t>(c)]; }

  void set_coefficient(int c, const MultiIndex& idx, Complex value) {
    const long p = basis_->position(idx.exponents);
    if (p < 0) throw std::invalid_argument("monomial outside truncation degree");
    components_[static_cast<std::size_t>(c)].set_coefficient(static_cast<std::size_t>(p), value);
  }

  Complex coefficient(int c, const MultiIndex& idx) const {
    const long p = basis_->position(idx.exponents);
    if (p < 0) return Complex(0, 0);
    return components_[static_cast<std::size_t>(c)].coefficient(static_cast<std::size_t>(p));
  }

  /// True when every component has zero constant term.
  bool fixes_origin() const {
    for (const auto& comp : components_) {
      if (comp.coefficient(0) != Complex(0, 0)) return false;
    }
    return true;
  }

  /// Largest coefficient-magnitude sum across components, grouped by degree.
  std::vector<double> degree_norms() const {
    std::vector<double> out(static_cast<std::size_t>(degree() + 1), 0.0);
    for (const auto& comp : components_) {
      auto n = comp.degree_coefficient_norms();
      for (std::size_t d = 0; d < n.size(); ++d) out[d] = std::max(out[d], n[d]);
    }
    return out;
  }

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  std::vector<Series> components_;
};

/// f o g truncated at the common degree. The inner map must fix the origin;
/// the composition of the linear parts is the product of the linear parts.
inline Jet jet_compose(const Jet& f, const Jet& g) {
  if (f.dimension() != g.dimension())
    throw std::invalid_argument("jet_compose: dimension mismatch");
  if (f.degree() != g.degree())
    throw std::invalid_argument("jet_compose: truncation degree mismatch");
  if (!g.fixes_origin())
    throw std::invalid_argument("jet_compose: inner map must fix the origin");

  const int m = f.dimension();
  const int d = f.degree();
  auto basis = MonomialBasis::get(m, d);

  // Powers g_i^e for e = 0..d. g_i has no constant term, so g_i^e has
  // valuation e and the truncated products stay exact up to degree d.
  std::vector<std::vector<Series>> pw(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    pw[i].reserve(static_cast<std::size_t>(d + 1));
    Series one(basis);
    one.set_coefficient(0, Complex(1, 0));
    pw[i].push_back(one);
    for (int e = 1; e <= d; ++e) {
      pw[i].push_back(pw[i][static_cast<std::size_t>(e - 1)].multiply(g.component(i)));
    }
  }

  Jet out(m, d);
  for (int c = 0; c < m; ++c) {
    Series acc(basis);
    const Series& fc = f.component(c);
    for (std::size_t k = 0; k < basis->size(); ++k) {
      const Complex coeff = fc.coefficient(k);
      if (coeff == Complex(0, 0)) continue;
      const auto& e = basis->monomial(k).exponents;
      // Term coeff * prod_i g_i^{e_i}.
      int first = -1;
      for (int i = 0; i < m; ++i) {
        if (e[i] != 0) { first = i; break; }
      }
      if (first < 0) {
        acc.add_coefficient(0, coeff);
        continue;
      }
      Series term = pw[first][static_cast<std::size_t>(e[first])];
      for (int i = first + 1; i < m; ++i) {
        if (e[i] != 0) term = term.multiply(pw[i][static_cast<std::size_t>(e[i])]);
      }
      term *= coeff;
      acc += term;
    }
    out.component(c) = acc;
  }
  return out;
}

inline Eigen::VectorXcd jet_evaluate(const Jet& f, const Eigen::VectorXcd& z) {
  if (z.size() != f.dimension())
    throw std::invalid_argument("jet_evaluate: dimension mismatch");
  Eigen::VectorXcd out(f.dimension());
  for (int c = 0; c < f.dimension(); ++c) out[c] = f.component(c).evaluate(z);
  return out;
}

/// df(0): the degree-1 coefficient matrix.
inline Eigen::MatrixXcd linear_part(const Jet& f) {
  const int m = f.dimension();
  Eigen::MatrixXcd M(m, m);
  std::vector<int> e(static_cast<std::size_t>(m), 0);
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < m; ++i) {
      e[static_cast<std::size_t>(i)] = 1;
      M(c, i) = f.coefficient(c, MultiIndex(e));
      e[static_cast<std::size_t>(i)] = 0;
    }
  }
  return M;
}

/// n-fold self-composition; n = 0 yields the identity jet.
inline Jet jet_iterate(const Jet& f, long n) {
  if (n < 0) throw std::invalid_argument("jet_iterate: n must be >= 0");
  if (n > 0 && !f.fixes_origin())
    throw std::invalid_argument("jet_iterate: map must fix the origin");
  Jet result = Jet::identity(f.dimension(), f.degree());
  for (long k = 0; k < n; ++k) result = jet_compose(f, result);
  return result;
}

}  // namespace germlab
