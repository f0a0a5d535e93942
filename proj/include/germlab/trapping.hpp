#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "germlab/germ_ensemble.hpp"
#include "germlab/rng.hpp"

namespace germlab {

struct TrappingAtomBound {
  double linear_norm = 0.0;   // ||df(0)||
  double alpha = 0.0;         // ||df(0)|| + epsilon
  double remainder_slope = 0.0;  // sum_d C_d r^(d-1) at the returned radius
  double mc_max_ratio = 0.0;  // max sampled ||f(z)||/||z|| on the boundary sphere
};

struct TrappingReport {
  double epsilon = 0.0;
  double radius = 0.0;
  double expected_log_alpha = 0.0;  // E log(||df(0)|| + epsilon), must be < 0
  std::vector<TrappingAtomBound> table;
  long boundary_samples = 0;
  long violations = 0;  // boundary samples with ||f(z)|| > alpha ||z|| (1 + slack)
  std::uint64_t seed = 0;
};

namespace detail {

inline double operator_norm(const Eigen::MatrixXcd& m) {
  return m.jacobiSvd().singularValues()(0);
}

/// sum over degrees d >= 2 of C_d r^(d-1), where C_d bounds the vector norm
/// of the degree-d part: ||f(z) - df(0) z|| <= ||z|| * slope(||z||).
inline double remainder_slope(const Jet& f, double r) {
  const int m = f.dimension();
  double sumsq = 0.0;
  for (int c = 0; c < m; ++c) {
    const auto norms = f.component(c).degree_coefficient_norms();
    double comp = 0.0;
    double rp = r;  // r^(d-1)
    for (std::size_t d = 2; d < norms.size(); ++d) {
      comp += norms[d] * rp;
      rp *= r;
    }
    sumsq += comp * comp;
  }
  return std::sqrt(sumsq);
}

}  // namespace detail

/// Finds (epsilon, r) realizing the attracting trapping construction: with
/// alpha_f = ||df(0)|| + epsilon one has E log alpha_f < 0 and every atom
/// contracts by alpha_f on B_r, verified by a coefficient-norm bound on the
/// nonlinear remainder plus dense boundary sampling. When no epsilon is
/// requested, half the critical value (bisected root of E log(||df||+e) = 0)
/// is used.
inline TrappingReport trapping_radius(const GermEnsemble& ensemble,
                                      std::optional<double> requested_epsilon = {},
                                      long boundary_samples = 2000,
                                      std::uint64_t seed = 1) {
  const GermEnsemble finite = ensemble.materialized();
  const std::size_t count = finite.atom_count();

  std::vector<double> linear_norms(count);
  double expected_log_df = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    linear_norms[i] = detail::operator_norm(linear_part(finite.atom(i)));
    expected_log_df += finite.probability(i) *
                       (linear_norms[i] > 0.0 ? std::log(linear_norms[i])
                                              : -std::numeric_limits<double>::infinity());
  }
  if (!(expected_log_df < 0.0))
    throw std::invalid_argument("trapping_radius: ensemble is not attracting (E log||df(0)|| >= 0)");

  auto expected_log_alpha = [&](double eps) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      s += finite.probability(i) * std::log(linear_norms[i] + eps);
    }
    return s;
  };

  double epsilon;
  if (requested_epsilon) {
    epsilon = *requested_epsilon;
    if (!(epsilon > 0.0) || !(expected_log_alpha(epsilon) < 0.0))
      throw std::invalid_argument("trapping_radius: requested epsilon does not keep E log alpha < 0");
  } else {
    // Bisect the critical epsilon where E log(||df||+e) crosses 0.
    double lo = 0.0, hi = 1.0;
    while (expected_log_alpha(hi) < 0.0 && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (expected_log_alpha(mid) < 0.0 ? lo : hi) = mid;
    }
    epsilon = 0.5 * lo;
    if (!(epsilon > 0.0) || !(expected_log_alpha(epsilon) < 0.0))
      throw std::invalid_argument("trapping_radius: no valid epsilon found");
  }

  // Largest r with remainder_slope(atom, r) <= epsilon for every atom.
  constexpr double kFloor = 1e-8;
  double radius = finite.escape_radius();
  for (std::size_t i = 0; i < count; ++i) {
    const Jet& f = finite.atom(i);
    if (detail::remainder_slope(f, radius) <= epsilon) continue;
    double lo = 0.0, hi = radius;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (detail::remainder_slope(f, mid) <= epsilon ? lo : hi) = mid;
    }
    radius = std::min(radius, lo);
  }
  if (!(radius > kFloor))
    throw std::runtime_error("trapping_radius: no radius above the 1e-8 floor");

  TrappingReport rep;
  rep.epsilon = epsilon;
  rep.radius = radius;
  rep.expected_log_alpha = expected_log_alpha(epsilon);
  rep.boundary_samples = boundary_samples;
  rep.seed = seed;

  // Dense boundary sampling: per-atom contraction check on the sphere of
  // radius r, with 1-ulp style slack for exact-equality cases.
  SplitMix64 rng(split_seed(seed, 0x74726170ULL, 0));
  std::vector<Eigen::VectorXcd> sphere;
  sphere.reserve(static_cast<std::size_t>(boundary_samples));
  for (long s = 0; s < boundary_samples; ++s) {
    Eigen::VectorXcd dir = sample_ball(rng, finite.dimension(), 1.0);
    const double nrm = dir.norm();
    sphere.push_back(nrm > 0.0 ? Eigen::VectorXcd(dir * (radius / nrm))
                               : Eigen::VectorXcd::Zero(finite.dimension()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    TrappingAtomBound bound;
    bound.linear_norm = linear_norms[i];
    bound.alpha = linear_norms[i] + epsilon;
    bound.remainder_slope = detail::remainder_slope(finite.atom(i), radius);
    for (const auto& z : sphere) {
      const double ratio = jet_evaluate(finite.atom(i), z).norm() / z.norm();
      bound.mc_max_ratio = std::max(bound.mc_max_ratio, ratio);
      if (ratio > bound.alpha * (1.0 + 1e-12)) ++rep.violations;
    }
    rep.table.push_back(bound);
  }
  return rep;
}

struct UniformTrappingStats {
  long violations = 0;   // orbits leaving B_eps within max_steps
  double max_norm = 0.0;
  long trials = 0;
  long mesh_points = 0;
  std::uint64_t seed = 0;
};

/// Samples sequences against a deterministic mesh of B_rho and counts orbits
/// exiting B_eps within max_steps. Mesh points are radius-graded directions
/// from a dedicated substream, identical for every trial.
inline UniformTrappingStats uniform_trapping_check(const GermEnsemble& ensemble, double rho,
                                                   double eps, long max_steps, long trials,
                                                   std::uint64_t seed, long mesh_points = 64) {
  if (!(rho < eps) || !(eps <= ensemble.escape_radius()))
    throw std::invalid_argument("uniform_trapping_check: need rho < eps <= R");

  std::vector<Eigen::VectorXcd> mesh;
  mesh.reserve(static_cast<std::size_t>(mesh_points));
  SplitMix64 mesh_rng(split_seed(seed, 0x6d657368ULL, 0));
  const long shells = 4;
  for (long i = 0; i < mesh_points; ++i) {
    Eigen::VectorXcd dir = sample_ball(mesh_rng, ensemble.dimension(), 1.0);
    const double nrm = dir.norm();
    const double r = rho * static_cast<double>(i % shells + 1) / static_cast<double>(shells);
    mesh.push_back(nrm > 0.0 ? Eigen::VectorXcd(dir * (r / nrm))
                             : Eigen::VectorXcd::Zero(ensemble.dimension()));
  }

  UniformTrappingStats stats;
  stats.trials = trials;
  stats.mesh_points = mesh_points;
  stats.seed = seed;
  for (long t = 0; t < trials; ++t) {
    for (long i = 0; i < mesh_points; ++i) {
      SplitMix64 rng(split_seed(seed, static_cast<std::uint64_t>(t * mesh_points + i)));
      Eigen::VectorXcd z = mesh[static_cast<std::size_t>(i)];
      bool violated = false;
      for (long k = 0; k < max_steps; ++k) {
        z = ensemble.apply_sampled(rng, z);
        const double nrm = z.norm();
        if (nrm > stats.max_norm || std::isnan(nrm)) stats.max_norm = nrm;
        if (!(nrm <= eps)) {
          violated = true;
          break;
        }
      }
      if (violated) ++stats.violations;
    }
  }
  return stats;
}

}  // namespace germlab
