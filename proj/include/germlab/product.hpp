#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "germlab/matrix_ensemble.hpp"
#include "germlab/rng.hpp"

namespace germlab {

/// Log singular values and derived scalars of one sampled product
/// M_n ... M_1. Values are exact logs; the smallest ones stay meaningful even
/// when the product's condition number is far beyond double range.
struct ProductSample {
  std::vector<double> log_singular_values;  // nonincreasing; -inf for exact kernels
  double log_norm = 0.0;                    // log of the operator 2-norm
  double log_abs_det = 0.0;                 // sum of log singular values
  std::uint64_t seed = 0;
  long n = 0;
};

namespace detail {

/// One-sided Jacobi SVD on columns carried as (unit vector, log scale).
/// Columns A_j represent A_j * exp(l_j); rotations are evaluated in a scaled
/// parametrization that stays finite for arbitrarily large scale gaps (the
/// rotation degenerates to a Gram-Schmidt projection of the small column
/// against the large one). Right rotations are accumulated into V. This keeps
/// every log singular value accurate to roundoff regardless of the product's
/// dynamic range.
inline void jacobi_scaled(Eigen::MatrixXcd& a, std::vector<double>& l,
                          Eigen::MatrixXcd& v) {
  const int m = static_cast<int>(a.cols());
  const double tol = 1e-14;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 60; ++sweep) {
    changed = false;
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        const int i = l[static_cast<std::size_t>(p)] >= l[static_cast<std::size_t>(q)] ? p : q;
        const int k = i == p ? q : p;
        const double li = l[static_cast<std::size_t>(i)];
        const double lk = l[static_cast<std::size_t>(k)];
        if (!std::isfinite(li) || !std::isfinite(lk)) continue;

        const double gpp = a.col(i).squaredNorm();
        const double gqq = a.col(k).squaredNorm();
        const Complex gpq = a.col(i).dot(a.col(k));
        const double r = std::abs(gpq);
        if (r <= tol * std::sqrt(gpp * gqq)) continue;
        changed = true;

        const Complex phase = gpq / r;
        const double w = std::exp(lk - li);  // <= 1; underflow to 0 is fine
        // tau = (aqq - app) / (2 apq) of the true Gram block; mu = tan(theta)/w
        // stays O(1) for every w in [0,1].
        const double as = (w * w * gqq - gpp) / (2.0 * r);
        const double mu =
            (as >= 0.0 ? 1.0 : -1.0) / (std::abs(as) + std::sqrt(w * w + as * as));
        const double t = mu * w;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        const Eigen::VectorXcd atk = a.col(k) * std::conj(phase);
        const Eigen::VectorXcd vtk = v.col(k) * std::conj(phase);
        const Eigen::VectorXcd new_ai = c * (a.col(i) - (mu * w * w) * atk);
        const Eigen::VectorXcd new_ak = c * (mu * a.col(i) + atk);
        const Eigen::VectorXcd new_vi = c * v.col(i) - s * vtk;
        const Eigen::VectorXcd new_vk = s * v.col(i) + c * vtk;

        const double ni = new_ai.norm();
        const double nk = new_ak.norm();
        if (ni > 0.0) {
          a.col(i) = new_ai / ni;
          l[static_cast<std::size_t>(i)] = li + std::log(ni);
        } else {
          a.col(i).setZero();
          l[static_cast<std::size_t>(i)] = -std::numeric_limits<double>::infinity();
        }
        if (nk > 0.0) {
          a.col(k) = new_ak / nk;
          l[static_cast<std::size_t>(k)] = lk + std::log(nk);
        } else {
          a.col(k).setZero();
          l[static_cast<std::size_t>(k)] = -std::numeric_limits<double>::infinity();
        }
        v.col(i) = new_vi;
        v.col(k) = new_vk;
      }
    }
  }
}

}  // namespace detail

/// Accumulates a left product M_n ... M_1 in the factored form
///   product = U diag(exp(s)) V*
/// with unit columns in U, V unitary, and s stored as logs (descending,
/// -inf marking an exact kernel direction). Pending factors are multiplied
/// densely and folded in every `renorm_period` steps, or earlier if entries
/// grow past 1e30. Period and trigger are sized so the per-flush condition
/// number stays far below the scale gaps the refactorization must respect,
/// which holds for atom norms up to ~1e3.
class ProductAccumulator {
 public:
  explicit ProductAccumulator(int dimension, int renorm_period = 10)
      : m_(dimension),
        period_(renorm_period),
        u_(Eigen::MatrixXcd::Identity(dimension, dimension)),
        v_(Eigen::MatrixXcd::Identity(dimension, dimension)),
        s_(static_cast<std::size_t>(dimension), 0.0),
        pending_(Eigen::MatrixXcd::Identity(dimension, dimension)) {}

  int dimension() const { return m_; }
  long steps() const { return steps_; }

  void multiply(const Eigen::MatrixXcd& factor) {
    pending_ = factor * pending_;
    ++pending_count_;
    ++steps_;
    if (pending_count_ >= period_ || pending_.cwiseAbs().maxCoeff() > 1e30) {
      flush();
    }
  }

  /// Log singular values of the product so far (descending), flushing first.
  const std::vector<double>& log_singular_values() {
    flush();
    return s_;
  }

  /// log || M_n ... M_1 || without disturbing the pending block; usable after
  /// every step (needed for per-step norm minima).
  double log_norm_now() const {
    if (pending_count_ == 0) return s_.empty() ? 0.0 : s_[0];
    const Eigen::MatrixXcd b = pending_ * u_;
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> t(static_cast<std::size_t>(m_));
    for (int j = 0; j < m_; ++j) {
      const double cn = b.col(j).norm();
      t[static_cast<std::size_t>(j)] =
          cn > 0.0 ? s_[static_cast<std::size_t>(j)] + std::log(cn)
                   : -std::numeric_limits<double>::infinity();
      top = std::max(top, t[static_cast<std::size_t>(j)]);
    }
    if (!std::isfinite(top)) return top;
    Eigen::MatrixXcd c(m_, m_);
    for (int j = 0; j < m_; ++j) {
      const double sc = std::exp(s_[static_cast<std::size_t>(j)] - top);
      c.col(j) = b.col(j) * sc;
    }
    // Top singular value via the Gram matrix: the dense SVD mishandles the
    // extreme column grading, while lambda_max of c*c stays O(1)-accurate.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.adjoint() * c);
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmax > 0.0)) return -std::numeric_limits<double>::infinity();
    return top + 0.5 * std::log(lmax);
  }

  /// Left factor with unit columns (kernel directions are zero columns).
  const Eigen::MatrixXcd& left_factor() {
    flush();
    return u_;
  }

  /// Right unitary factor V, so that (M^n)* M^n = V diag(exp(2s)) V*.
  const Eigen::MatrixXcd& right_factor() {
    flush();
    return v_;
  }

  ProductSample sample(std::uint64_t seed) {
    flush();
    ProductSample out;
    out.log_singular_values = s_;
    out.log_norm = s_[0];
    out.log_abs_det = std::accumulate(s_.begin(), s_.end(), 0.0);
    out.seed = seed;
    out.n = steps_;
    return out;
  }

  void flush() {
    if (pending_count_ == 0) return;
    const Eigen::MatrixXcd x = pending_ * u_;

    Eigen::MatrixXcd cols(m_, m_);
    std::vector<double> l(static_cast<std::size_t>(m_));
    for (int j = 0; j < m_; ++j) {
      const double cn = x.col(j).norm();
      if (cn > 0.0 && std::isfinite(s_[static_cast<std::size_t>(j)])) {
        cols.col(j) = x.col(j) / cn;
        l[static_cast<std::size_t>(j)] = s_[static_cast<std::size_t>(j)] + std::log(cn);
      } else {
        cols.col(j).setZero();
        l[static_cast<std::size_t>(j)] = -std::numeric_limits<double>::infinity();
      }
    }

    Eigen::MatrixXcd vwork = v_;
    detail::jacobi_scaled(cols, l, vwork);

    // Restore descending order.
    std::vector<int> perm(static_cast<std::size_t>(m_));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
      return l[static_cast<std::size_t>(a)] > l[static_cast<std::size_t>(b)];
    });
    for (int j = 0; j < m_; ++j) {
      const int src = perm[static_cast<std::size_t>(j)];
      s_[static_cast<std::size_t>(j)] = l[static_cast<std::size_t>(src)];
      u_.col(j) = cols.col(src);
      v_.col(j) = vwork.col(src);
    }

    pending_ = Eigen::MatrixXcd::Identity(m_, m_);
    pending_count_ = 0;
  }

 private:
  int m_;
  int period_;
  Eigen::MatrixXcd u_;
  Eigen::MatrixXcd v_;
  std::vector<double> s_;
  Eigen::MatrixXcd pending_;
  int pending_count_ = 0;
  long steps_ = 0;
};

/// Sampled product M^n for one trial stream; deterministic in (spec, n, seed).
inline ProductSample sample_product(const CocycleSpec& spec, long n, std::uint64_t seed,
                                    int renorm_period = 10) {
  if (n < 1) throw std::invalid_argument("sample_product: n must be >= 1");
  ProductAccumulator acc(spec.dimension(), renorm_period);
  auto stream = spec.factor_stream(seed);
  for (long k = 0; k < n; ++k) acc.multiply(stream.next());
  return acc.sample(seed);
}

}  // namespace germlab
