#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "germlab/rng.hpp"

namespace germlab {

/// Finite-support probability measure on complex m x m matrices.
class MatrixEnsemble {
 public:
  MatrixEnsemble(int dimension, std::vector<Eigen::MatrixXcd> atoms,
                 std::vector<double> probabilities)
      : dimension_(dimension),
        atoms_(std::move(atoms)),
        probs_(std::move(probabilities)) {
    if (atoms_.empty()) throw std::invalid_argument("ensemble needs at least one atom");
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
      if (a.rows() != dimension_ || a.cols() != dimension_)
        throw std::invalid_argument("atom dimension mismatch");
    }
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      cumulative_[i] = acc;
    }
  }

  int dimension() const { return dimension_; }
  std::size_t size() const { return atoms_.size(); }
  const Eigen::MatrixXcd& atom(std::size_t i) const { return atoms_[i]; }
  double probability(std::size_t i) const { return probs_[i]; }

  std::size_t sample_index(SplitMix64& rng) const {
    return rng.next_index(cumulative_);
  }

  /// Exact probability-weighted E log|det M|; -inf if any atom is singular.
  double expected_log_abs_det() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const double d = std::abs(atoms_[i].determinant());
      if (d == 0.0) return -std::numeric_limits<double>::infinity();
      sum += probs_[i] * std::log(d);
    }
    return sum;
  }

  bool all_invertible() const {
    for (const auto& a : atoms_) {
      if (std::abs(a.determinant()) == 0.0) return false;
    }
    return true;
  }

  /// Every atom scaled by c (spectrum shifts by log|c|, log-det by m log|c|).
  MatrixEnsemble scaled(Complex c) const {
    std::vector<Eigen::MatrixXcd> scaled_atoms;
    scaled_atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) scaled_atoms.push_back(c * a);
    return MatrixEnsemble(dimension_, std::move(scaled_atoms), probs_);
  }

 private:
  int dimension_;
  std::vector<Eigen::MatrixXcd> atoms_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// Deterministic driver x -> x + theta mod 1 with a matrix-valued sample
/// function. Evaluation at x_k = x0 + k theta is done in plain double
/// precision (drift bound n ulp); x0 is drawn per trial.
struct RotationDriver {
  double theta = 0.0;
  int dimension = 1;
  std::function<Eigen::MatrixXcd(double)> matrix_at;
  // Reproducibility tags: family name + parameters echoed into output files.
  std::string family;
  int levels = 0;
};

/// Cocycle specification: i.i.d. matrix draws or a rotation-driven sequence.
class CocycleSpec {
 public:
  explicit CocycleSpec(MatrixEnsemble ensemble)
      : dimension_(ensemble.dimension()), driver_(std::move(ensemble)) {}

  explicit CocycleSpec(RotationDriver rotation)
      : dimension_(rotation.dimension), driver_(std::move(rotation)) {
    const auto& rot = std::get<RotationDriver>(driver_);
    if (!(rot.theta > 0.0 && rot.theta < 1.0))
      throw std::invalid_argument("rotation angle must lie in (0,1)");
    if (!rot.matrix_at) throw std::invalid_argument("rotation driver needs a matrix function");
  }

  int dimension() const { return dimension_; }
  bool is_iid() const { return std::holds_alternative<MatrixEnsemble>(driver_); }
  const MatrixEnsemble& ensemble() const { return std::get<MatrixEnsemble>(driver_); }
  const RotationDriver& rotation() const { return std::get<RotationDriver>(driver_); }

  /// Stateful per-trial factor stream. For i.i.d. drivers each call draws an
  /// atom; for rotation drivers the first call draws x0 and subsequent calls
  /// advance the orbit.
  class FactorStream {
   public:
    FactorStream(const CocycleSpec& spec, std::uint64_t stream_seed)
        : spec_(&spec), rng_(stream_seed) {
      if (!spec.is_iid()) {
        x_ = rng_.next_double();
      }
    }

    Eigen::MatrixXcd next() {
      if (spec_->is_iid()) {
        return spec_->ensemble().atom(spec_->ensemble().sample_index(rng_));
      }
      const auto& rot = spec_->rotation();
      Eigen::MatrixXcd M = rot.matrix_at(x_);
      x_ = std::fmod(x_ + rot.theta, 1.0);
      return M;
    }

   private:
    const CocycleSpec* spec_;
    SplitMix64 rng_;
    double x_;
  };

  FactorStream factor_stream(std::uint64_t stream_seed) const {
    return FactorStream(*this, stream_seed);
  }

 private:
  int dimension_;
  std::variant<MatrixEnsemble, RotationDriver> driver_;
};

}  // namespace germlab
