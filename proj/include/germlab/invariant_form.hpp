#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace germlab {

struct InvariantFormResult {
  bool success = false;
  Eigen::MatrixXcd form;        // Hermitian positive definite, trace = m
  double residual = 0.0;        // max_i ||M_i* P M_i - P|| / ||P||
  double condition = 0.0;       // cond(P) at exit
  long iterations = 0;
  std::vector<double> residual_trajectory;  // sampled every few iterations
};

namespace detail {

inline double form_residual(const std::vector<Eigen::MatrixXcd>& gens,
                            const Eigen::MatrixXcd& p) {
  double worst = 0.0;
  const double pn = p.norm();
  for (const auto& g : gens) {
    const double r = (g.adjoint() * p * g - p).norm();
    worst = std::max(worst, r);
  }
  return pn > 0.0 ? worst / pn : std::numeric_limits<double>::infinity();
}

inline Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& p) {
  return 0.5 * (p + p.adjoint());
}

}  // namespace detail

/// Searches for a Hermitian positive definite P with M_i* P M_i = P for all
/// generators, by damped fixed-point iteration from P = I:
///   P <- normalize( (avg_i M_i* P M_i + P) / 2 )
/// with a Cesaro average of the iterates tracked alongside. When a common
/// invariant form exists the averaging map is nonexpansive toward it;
/// nonexistence shows up as residual stagnation or conditioning blowup
/// (declared failed after max_iters or cond(P) > 1e12). On success,
/// H = P^(1/2) conjugates every generator to a near-unitary matrix.
inline InvariantFormResult find_invariant_form(
    const std::vector<Eigen::MatrixXcd>& generators, long max_iters = 10000,
    double tol = 1e-8) {
  if (generators.empty())
    throw std::invalid_argument("find_invariant_form: no generators");
  const int m = static_cast<int>(generators.front().rows());
  for (const auto& g : generators) {
    if (g.rows() != m || g.cols() != m)
      throw std::invalid_argument("find_invariant_form: generator dimension mismatch");
    if (std::abs(g.determinant()) == 0.0)
      throw std::invalid_argument("find_invariant_form: generator not invertible");
  }
  const double weight = 1.0 / static_cast<double>(generators.size());

  auto normalize = [m](Eigen::MatrixXcd p) {
    const double tr = p.trace().real();
    if (tr > 0.0) p *= static_cast<double>(m) / tr;
    return p;
  };

  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd cesaro = p;
  long cesaro_count = 1;

  InvariantFormResult best;
  best.form = p;
  best.residual = detail::form_residual(generators, p);
  best.condition = 1.0;

  InvariantFormResult out;
  double stagnation_floor = std::numeric_limits<double>::infinity();
  long since_improvement = 0;

  for (long it = 0; it < max_iters; ++it) {
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(m, m);
    for (const auto& g : generators) avg += weight * (g.adjoint() * p * g);
    p = normalize(detail::hermitize(0.5 * (avg + p)));
    cesaro = cesaro + (p - cesaro) / static_cast<double>(cesaro_count + 1);
    ++cesaro_count;

    if (it % 8 == 0 || it == max_iters - 1) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
      const double lmin = es.eigenvalues().minCoeff();
      const double lmax = es.eigenvalues().maxCoeff();
      const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
      const double res_p = detail::form_residual(generators, p);
      const Eigen::MatrixXcd ces_n = normalize(detail::hermitize(cesaro));
      const double res_c = detail::form_residual(generators, ces_n);
      const double res = std::min(res_p, res_c);
      out.residual_trajectory.push_back(res);
      if (res < best.residual) {
        best.residual = res;
        best.form = res_p <= res_c ? p : ces_n;
        best.condition = cond;
        best.iterations = it + 1;
      }
      if (cond > 1e12) break;
      if (res < stagnation_floor * 0.999) {
        stagnation_floor = res;
        since_improvement = 0;
      } else if (++since_improvement > 50) {
        break;  // residual no longer improving
      }
      if (best.residual < 1e-15) break;
    }
  }

  out.form = best.form;
  out.residual = best.residual;
  out.condition = best.condition;
  out.iterations = best.iterations;
  out.success = best.residual <= tol;
  return out;
}

/// H = P^(1/2): the change of basis that makes the generators near-unitary.
inline Eigen::MatrixXcd form_square_root(const Eigen::MatrixXcd& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Largest unitarity defect ||(H M H^-1)* (H M H^-1) - I|| over generators.
inline double conjugated_unitarity_defect(const std::vector<Eigen::MatrixXcd>& generators,
                                          const Eigen::MatrixXcd& p) {
  const Eigen::MatrixXcd h = form_square_root(p);
  const Eigen::MatrixXcd hinv = h.inverse();
  const int m = static_cast<int>(p.rows());
  double worst = 0.0;
  for (const auto& g : generators) {
    const Eigen::MatrixXcd q = h * g * hinv;
    worst = std::max(worst, (q.adjoint() * q - Eigen::MatrixXcd::Identity(m, m)).norm());
  }
  return worst;
}

}  // namespace germlab
