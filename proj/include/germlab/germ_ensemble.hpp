#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "germlab/jet.hpp"
#include "germlab/matrix_ensemble.hpp"
#include "germlab/rng.hpp"

namespace germlab {

/// Countable family f_i(z) = lambda1 z + a_i z^2 with a_i = lambda1^(-3 2^i)
/// and P(i) = 2^-i for i >= 1, truncated at `cap` and renormalized. The
/// truncation discards total-variation mass 2^-cap (reported). Index 0 is the
/// unit-coefficient member a_0 = 1, used by the second-coefficient recursion
/// but carrying no probability mass.
struct IndexedQuadraticFamily {
  double lambda1 = 0.5;
  int cap = 60;

  double quadratic_coefficient_log(int index) const {
    if (index == 0) return 0.0;  // a_0 = 1
    return -3.0 * std::ldexp(1.0, index) * std::log(lambda1);
  }

  /// a_i; overflows to +inf for indices beyond double range.
  double quadratic_coefficient(int index) const {
    if (index == 0) return 1.0;
    return std::pow(lambda1, -3.0 * std::ldexp(1.0, index));
  }

  double tail_mass() const { return std::ldexp(1.0, -cap); }

  /// Renormalized index probabilities over 1..cap.
  std::vector<double> index_probabilities() const {
    std::vector<double> p(static_cast<std::size_t>(cap));
    const double norm = 1.0 - tail_mass();
    for (int i = 1; i <= cap; ++i) {
      p[static_cast<std::size_t>(i - 1)] = std::ldexp(1.0, -i) / norm;
    }
    return p;
  }

  /// Evaluate f_i at z with the quadratic term computed in log-magnitude
  /// arithmetic, so indices whose coefficient overflows double still produce
  /// a finite value whenever lambda1 z + a_i z^2 is representable.
  Complex evaluate(int index, Complex z) const {
    const double la = quadratic_coefficient_log(index);
    const double lz = std::abs(z) > 0.0 ? std::log(std::abs(z)) : -std::numeric_limits<double>::infinity();
    const double lt = la + 2.0 * lz;
    Complex quad(0.0, 0.0);
    if (std::isfinite(lt)) {
      if (lt > 700.0) {
        // Magnitude beyond double range: saturate; the orbit has escaped any
        // finite ball.
        return Complex(std::numeric_limits<double>::infinity(), 0.0);
      }
      const Complex unit = z / std::abs(z);
      quad = std::exp(lt) * unit * unit;
    }
    return lambda1 * z + quad;
  }

  /// Atom as a jet; throws when a_i is not representable in double.
  Jet materialize(int index, int degree = Jet::kDefaultDegree) const {
    const double a = quadratic_coefficient(index);
    if (!std::isfinite(a))
      throw std::invalid_argument("indexed family: coefficient overflows double at index " +
                                  std::to_string(index));
    Jet f(1, degree);
    f.set_coefficient(0, MultiIndex({1}), Complex(lambda1, 0.0));
    f.set_coefficient(0, MultiIndex({2}), Complex(a, 0.0));
    return f;
  }
};

/// Finite- or countable-support probability measure on polynomial germs
/// fixing the origin, together with the escape radius R used for orbit
/// bookkeeping.
class GermEnsemble {
 public:
  GermEnsemble(int dimension, std::vector<Jet> atoms, std::vector<double> probabilities,
               double escape_radius = 10.0)
      : dimension_(dimension),
        escape_radius_(escape_radius),
        atoms_(std::move(atoms)),
        probs_(std::move(probabilities)) {
    if (atoms_.empty()) throw std::invalid_argument("germ ensemble needs at least one atom");
    if (atoms_.size() != probs_.size())
      throw std::invalid_argument("atom/probability count mismatch");
    double total = 0.0;
    for (double p : probs_) {
      if (p < 0.0) throw std::invalid_argument("negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("probabilities must sum to 1 within 1e-9");
    for (const auto& a : atoms_) {
      if (a.dimension() != dimension_) throw std::invalid_argument("atom dimension mismatch");
      if (!a.fixes_origin()) throw std::invalid_argument("atoms must fix the origin");
    }
    linear_flags_.reserve(atoms_.size());
    linear_mats_.reserve(atoms_.size());
    for (const auto& a : atoms_) {
      bool lin = true;
      for (int c = 0; c < dimension_ && lin; ++c) lin = a.component(c).is_linear();
      linear_flags_.push_back(lin);
      linear_mats_.push_back(lin ? linear_part(a) : Eigen::MatrixXcd());
    }
    build_cumulative();
  }

  GermEnsemble(IndexedQuadraticFamily family, double escape_radius = 10.0)
      : dimension_(1), escape_radius_(escape_radius), family_(family) {
    if (!(family.lambda1 > 0.0 && family.lambda1 < 1.0))
      throw std::invalid_argument("lambda1 must lie in (0,1)");
    if (family.cap < 1) throw std::invalid_argument("index cap must be >= 1");
    probs_ = family.index_probabilities();
    build_cumulative();
  }

  int dimension() const { return dimension_; }
  double escape_radius() const { return escape_radius_; }
  bool has_generator() const { return family_.has_value(); }
  const IndexedQuadraticFamily& generator() const { return *family_; }
  bool compact_support() const { return !family_.has_value(); }

  std::size_t atom_count() const { return probs_.size(); }
  const Jet& atom(std::size_t i) const { return atoms_[i]; }
  double probability(std::size_t i) const { return probs_[i]; }

  std::size_t sample_index(SplitMix64& rng) const { return rng.next_index(cumulative_); }

  /// Apply atom i pointwise (linear atoms take the cached matrix path).
  Eigen::VectorXcd apply_atom(std::size_t i, const Eigen::VectorXcd& z) const {
    if (family_) {
      Eigen::VectorXcd out(1);
      out[0] = family_->evaluate(static_cast<int>(i) + 1, z[0]);
      return out;
    }
    if (linear_flags_[i]) return linear_mats_[i] * z;
    return jet_evaluate(atoms_[i], z);
  }

  /// One random step: apply an atom sampled from the per-trial stream.
  Eigen::VectorXcd apply_sampled(SplitMix64& rng, const Eigen::VectorXcd& z) const {
    return apply_atom(sample_index(rng), z);
  }

  /// Linear parts pushed forward into a matrix ensemble (same probabilities).
  MatrixEnsemble linear_part_ensemble() const {
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(probs_.size());
    if (family_) {
      Eigen::MatrixXcd L(1, 1);
      L(0, 0) = Complex(family_->lambda1, 0.0);
      for (std::size_t i = 0; i < probs_.size(); ++i) mats.push_back(L);
    } else {
      for (const auto& a : atoms_) mats.push_back(linear_part(a));
    }
    return MatrixEnsemble(dimension_, std::move(mats), probs_);
  }

  /// Finite materialization (generator case resolves indices 1..cap to jets;
  /// throws when a coefficient overflows double).
  GermEnsemble materialized(int degree = Jet::kDefaultDegree) const {
    if (!family_) return *this;
    std::vector<Jet> atoms;
    atoms.reserve(probs_.size());
    for (int i = 1; i <= family_->cap; ++i) atoms.push_back(family_->materialize(i, degree));
    return GermEnsemble(1, std::move(atoms), probs_, escape_radius_);
  }

 private:
  void build_cumulative() {
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      cumulative_[i] = acc;
    }
  }

  int dimension_;
  double escape_radius_;
  std::vector<Jet> atoms_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::optional<IndexedQuadraticFamily> family_;
  std::vector<bool> linear_flags_;
  std::vector<Eigen::MatrixXcd> linear_mats_;
};

/// Linear cocycle atoms reinterpreted as a germ ensemble of linear jets.
inline GermEnsemble to_germ_ensemble(const MatrixEnsemble& ensemble,
                                     double escape_radius = 10.0,
                                     int degree = Jet::kDefaultDegree) {
  std::vector<Jet> atoms;
  std::vector<double> probs;
  atoms.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    atoms.push_back(Jet::from_linear(ensemble.atom(i), degree));
    probs.push_back(ensemble.probability(i));
  }
  return GermEnsemble(ensemble.dimension(), std::move(atoms), std::move(probs), escape_radius);
}

}  // namespace germlab
