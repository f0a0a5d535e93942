#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "germlab/germ_ensemble.hpp"
#include "germlab/rng.hpp"

namespace germlab {

/// Snapshot-based estimate of a locally uniform limit g = lim f^{n_k} of one
/// sampled composition sequence, on a real
/// (Re z, Re w) grid over [-rho, rho]^2. Convergence is declared from a
/// verified Cauchy pair of snapshots: successive snapshots are tried first,
/// and failing that the best pair among all stored snapshots (the limit is
/// only guaranteed along subsequences, so any verified pair is acceptable
/// evidence).
struct LimitMapEstimate {
  bool converged = false;
  bool escaped = false;        // a tracked orbit left B_R before max_n
  int dimension = 2;
  int grid_size = 33;
  double rho = 0.1;
  long stride = 50;
  long max_n = 10000;
  double cauchy_tol = 1e-6;
  double fd_step = 0.0;        // finite-difference offset used for dg
  std::vector<Eigen::Vector2cd> grid;           // node centers, row-major
  std::vector<Eigen::Vector2cd> values;         // g at nodes (later snapshot of the pair)
  std::vector<Eigen::Matrix2cd> differentials;  // central-difference Jacobians
  long n_first = 0;
  long n_second = 0;
  double cauchy_defect = std::numeric_limits<double>::infinity();
  std::vector<double> defect_trajectory;        // successive-snapshot defects
  std::uint64_t seed = 0;
};

inline LimitMapEstimate limit_map_estimate(const GermEnsemble& ensemble, std::uint64_t seed,
                                           double rho = 0.1, int grid_size = 33,
                                           long stride = 50, double cauchy_tol = 1e-6,
                                           long max_n = 10000) {
  if (ensemble.dimension() != 2)
    throw std::invalid_argument("limit_map_estimate: implemented for dimension 2");
  if (grid_size < 3 || stride < 1 || max_n < stride)
    throw std::invalid_argument("limit_map_estimate: bad grid/stride parameters");

  LimitMapEstimate est;
  est.grid_size = grid_size;
  est.rho = rho;
  est.stride = stride;
  est.max_n = max_n;
  est.cauchy_tol = cauchy_tol;
  est.seed = seed;
  est.fd_step = 1e-5 * rho;

  const long nodes = static_cast<long>(grid_size) * grid_size;
  const long tracked = nodes * 5;  // center plus 4 finite-difference offsets
  est.grid.reserve(static_cast<std::size_t>(nodes));

  Eigen::MatrixXcd pts(2, tracked);
  const double h = est.fd_step;
  long col = 0;
  for (int iy = 0; iy < grid_size; ++iy) {
    for (int ix = 0; ix < grid_size; ++ix) {
      const double x = -rho + 2.0 * rho * ix / (grid_size - 1);
      const double y = -rho + 2.0 * rho * iy / (grid_size - 1);
      est.grid.emplace_back(Complex(x, 0.0), Complex(y, 0.0));
      pts.col(col++) = Eigen::Vector2cd(Complex(x, 0), Complex(y, 0));
      pts.col(col++) = Eigen::Vector2cd(Complex(x + h, 0), Complex(y, 0));
      pts.col(col++) = Eigen::Vector2cd(Complex(x - h, 0), Complex(y, 0));
      pts.col(col++) = Eigen::Vector2cd(Complex(x, 0), Complex(y + h, 0));
      pts.col(col++) = Eigen::Vector2cd(Complex(x, 0), Complex(y - h, 0));
    }
  }

  SplitMix64 rng(seed);
  std::vector<Eigen::MatrixXcd> snapshots;
  std::vector<long> snapshot_n;
  const double big_radius = ensemble.escape_radius();

  long n = 0;
  while (n < max_n && !est.escaped) {
    for (long s = 0; s < stride; ++s) {
      const std::size_t atom = ensemble.sample_index(rng);
      for (long p = 0; p < tracked; ++p) {
        pts.col(p) = ensemble.apply_atom(atom, pts.col(p));
      }
      ++n;
    }
    const double worst = pts.colwise().norm().maxCoeff();
    if (!(worst <= big_radius)) {
      est.escaped = true;
      break;
    }
    snapshots.push_back(pts);
    snapshot_n.push_back(n);
    const std::size_t k = snapshots.size();
    if (k >= 2) {
      double defect = 0.0;
      for (long node = 0; node < nodes; ++node) {
        defect = std::max(defect,
                          (snapshots[k - 1].col(node * 5) - snapshots[k - 2].col(node * 5)).norm());
      }
      est.defect_trajectory.push_back(defect);
      if (defect < cauchy_tol) {
        est.converged = true;
        est.n_first = snapshot_n[k - 2];
        est.n_second = snapshot_n[k - 1];
        est.cauchy_defect = defect;
        break;
      }
    }
  }

  // No successive pair: search all snapshot pairs for the smallest defect.
  std::size_t chosen = snapshots.empty() ? 0 : snapshots.size() - 1;
  if (!est.converged && snapshots.size() >= 2) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
      for (std::size_t j = i + 1; j < snapshots.size(); ++j) {
        double defect = 0.0;
        for (long node = 0; node < nodes && defect < best; ++node) {
          defect = std::max(defect,
                            (snapshots[j].col(node * 5) - snapshots[i].col(node * 5)).norm());
        }
        if (defect < best) {
          best = defect;
          bi = i;
          bj = j;
        }
      }
    }
    if (best < cauchy_tol) {
      est.converged = true;
      est.n_first = snapshot_n[bi];
      est.n_second = snapshot_n[bj];
      est.cauchy_defect = best;
      chosen = bj;
    }
  } else if (est.converged) {
    chosen = snapshots.size() - 1;
  }

  if (!snapshots.empty()) {
    const Eigen::MatrixXcd& snap = snapshots[chosen];
    est.values.reserve(static_cast<std::size_t>(nodes));
    est.differentials.reserve(static_cast<std::size_t>(nodes));
    for (long node = 0; node < nodes; ++node) {
      const long b = node * 5;
      est.values.push_back(snap.col(b));
      Eigen::Matrix2cd dg;
      dg.col(0) = (snap.col(b + 1) - snap.col(b + 2)) / (2.0 * h);
      dg.col(1) = (snap.col(b + 3) - snap.col(b + 4)) / (2.0 * h);
      est.differentials.push_back(dg);
    }
  }
  return est;
}

struct RankProfile {
  std::vector<Eigen::Vector2d> singular_values;  // per node, descending
  double sigma1_at_origin = 0.0;
  double max_sigma_min = 0.0;  // max over grid of the smallest singular value
  bool degenerate = false;     // max_sigma_min < tol
  bool nonvanishing = false;   // sigma1_at_origin >= 1 - tol
  double tol = 1e-3;
};

/// Singular values of the finite-difference Jacobians over the grid, with
/// degeneracy and norm-floor summary flags.
inline RankProfile rank_profile(const LimitMapEstimate& est, double tol = 1e-3) {
  if (!est.converged)
    throw std::invalid_argument("rank_profile: estimate did not converge");
  RankProfile out;
  out.tol = tol;
  out.singular_values.reserve(est.differentials.size());
  const long center = (static_cast<long>(est.grid_size) * est.grid_size) / 2;
  for (std::size_t i = 0; i < est.differentials.size(); ++i) {
    const Eigen::Vector2d sv = est.differentials[i].jacobiSvd().singularValues();
    out.singular_values.push_back(sv);
    out.max_sigma_min = std::max(out.max_sigma_min, sv(1));
    if (static_cast<long>(i) == center) out.sigma1_at_origin = sv(0);
  }
  out.degenerate = out.max_sigma_min < tol;
  out.nonvanishing = out.sigma1_at_origin >= 1.0 - tol;
  return out;
}

struct StableSetResult {
  Eigen::Vector2cd base_point;
  Eigen::Vector2cd base_value;
  std::vector<Eigen::Vector2cd> points;  // grid nodes with ||g - g(base)|| < level_tol
  Eigen::Vector2d line_point;            // total-least-squares line in the (x, y) slice
  Eigen::Vector2d line_direction;
  double fit_residual = 0.0;             // max orthogonal deviation from the line
  double level_tol = 1e-4;
};

/// Level set of the limit map through (the grid node nearest to) z, with a
/// one-complex-dimensional local slice fit reported as a line in the real
/// grid plane.
inline StableSetResult stable_set(const LimitMapEstimate& est, const Eigen::Vector2cd& z,
                                  double level_tol = 1e-4) {
  if (!est.converged)
    throw std::invalid_argument("stable_set: estimate did not converge");
  StableSetResult out;
  out.level_tol = level_tol;

  long best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    const double d = (est.grid[i] - z).norm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<long>(i);
    }
  }
  const double spacing = 2.0 * est.rho / (est.grid_size - 1);
  if (best_dist > spacing)
    throw std::runtime_error("stable_set: point outside the sampled grid region");
  out.base_point = est.grid[static_cast<std::size_t>(best)];
  out.base_value = est.values[static_cast<std::size_t>(best)];

  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    if ((est.values[i] - out.base_value).norm() < level_tol) {
      out.points.push_back(est.grid[i]);
    }
  }
  if (out.points.empty())
    throw std::runtime_error("stable_set: empty level set (point outside the valid region)");

  // Total-least-squares line through the selected nodes in the real slice.
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : out.points) mean += Eigen::Vector2d(p[0].real(), p[1].real());
  mean /= static_cast<double>(out.points.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : out.points) {
    const Eigen::Vector2d d = Eigen::Vector2d(p[0].real(), p[1].real()) - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  out.line_point = mean;
  out.line_direction = es.eigenvectors().col(1);  // dominant direction
  const Eigen::Vector2d normal = es.eigenvectors().col(0);
  for (const auto& p : out.points) {
    const Eigen::Vector2d d = Eigen::Vector2d(p[0].real(), p[1].real()) - mean;
    out.fit_residual = std::max(out.fit_residual, std::abs(d.dot(normal)));
  }
  return out;
}

}  // namespace germlab
