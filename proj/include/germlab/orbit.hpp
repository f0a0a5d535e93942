#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "germlab/germ_ensemble.hpp"
#include "germlab/lyapunov.hpp"
#include "germlab/rng.hpp"

namespace germlab {

struct OrbitRecord {
  Eigen::VectorXcd initial;
  std::vector<Eigen::VectorXcd> points;  // points[k] = f^k(z0), thinned if long
  long thinning = 1;                     // stride between stored points
  std::optional<long> escape_step;       // first k with ||f^k(z0)|| > R
  double max_norm = 0.0;
  std::uint64_t seed = 0;
  long steps_requested = 0;
};

/// Random orbit by pointwise evaluation of sampled atoms (exact for the
/// polynomial atoms used here; no jet-composition drift over long runs).
/// The atom index sequence is a pure function of the seed; `stream_offset`
/// skips that many draws first, which lets callers replay a shifted
/// sequence against a mid-orbit point.
inline OrbitRecord simulate_orbit(const GermEnsemble& ensemble, const Eigen::VectorXcd& z0,
                                  long max_steps, std::uint64_t seed,
                                  long stream_offset = 0) {
  if (z0.size() != ensemble.dimension())
    throw std::invalid_argument("simulate_orbit: dimension mismatch");
  if (z0.norm() > ensemble.escape_radius())
    throw std::invalid_argument("simulate_orbit: start point outside the escape ball");

  OrbitRecord rec;
  rec.initial = z0;
  rec.seed = seed;
  rec.steps_requested = max_steps;
  constexpr long kMaxStored = 100000;
  rec.thinning = max_steps / kMaxStored + 1;

  SplitMix64 rng(seed);
  for (long k = 0; k < stream_offset; ++k) ensemble.sample_index(rng);

  Eigen::VectorXcd z = z0;
  rec.points.push_back(z);
  rec.max_norm = z.norm();
  for (long k = 1; k <= max_steps; ++k) {
    z = ensemble.apply_sampled(rng, z);
    const double nrm = z.norm();
    if (nrm > rec.max_norm || std::isnan(nrm)) rec.max_norm = nrm;
    if (k % rec.thinning == 0) rec.points.push_back(z);
    if (!(nrm <= ensemble.escape_radius())) {
      rec.escape_step = k;
      if (k % rec.thinning != 0) rec.points.push_back(z);
      break;
    }
  }
  return rec;
}

struct FatouPointReport {
  Eigen::VectorXcd point;
  long bounded_count = 0;
  long trials = 0;
};

struct FatouReport {
  double fraction = 0.0;  // bounded (sequence, point) pairs / total pairs
  std::vector<FatouPointReport> per_point;
  double delta = 0.0;
  long max_steps = 0;
  long test_points = 0;
  long trials = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo surrogate for random-Fatou membership of the origin: the
/// fraction of (sequence, start point in B_delta) pairs whose orbit stays in
/// B_R for max_steps steps. Start points are drawn once from a dedicated
/// substream as unit-ball samples and scaled by delta, so for a fixed seed
/// the tested configurations are nested across delta and max_steps.
inline FatouReport fatou_membership(const GermEnsemble& ensemble, double delta,
                                    long test_points, long max_steps, long trials,
                                    std::uint64_t seed, int threads = 1) {
  if (!(delta > 0.0) || delta >= ensemble.escape_radius())
    throw std::invalid_argument("fatou_membership: need 0 < delta < R");
  if (test_points < 1 || trials < 1 || max_steps < 1)
    throw std::invalid_argument("fatou_membership: counts must be >= 1");

  constexpr std::uint64_t kPointTag = 0x706f696e74ULL;  // substream label
  std::vector<Eigen::VectorXcd> points;
  points.reserve(static_cast<std::size_t>(test_points));
  for (long i = 0; i < test_points; ++i) {
    SplitMix64 prng(split_seed(seed, kPointTag, static_cast<std::uint64_t>(i)));
    points.push_back(sample_ball(prng, ensemble.dimension(), 1.0) * delta);
  }

  FatouReport rep;
  rep.delta = delta;
  rep.max_steps = max_steps;
  rep.test_points = test_points;
  rep.trials = trials;
  rep.seed = seed;

  const long total_pairs = test_points * trials;
  auto bounded = run_trials<char>(total_pairs, threads, [&](long pair) {
    const long pi = pair / trials;
    SplitMix64 rng(split_seed(seed, static_cast<std::uint64_t>(pair)));
    Eigen::VectorXcd z = points[static_cast<std::size_t>(pi)];
    for (long k = 0; k < max_steps; ++k) {
      z = ensemble.apply_sampled(rng, z);
      if (!(z.norm() <= ensemble.escape_radius())) return static_cast<char>(0);
    }
    return static_cast<char>(1);
  });

  long total_bounded = 0;
  for (long i = 0; i < test_points; ++i) {
    FatouPointReport pr;
    pr.point = points[static_cast<std::size_t>(i)];
    pr.trials = trials;
    for (long t = 0; t < trials; ++t) {
      pr.bounded_count += bounded[static_cast<std::size_t>(i * trials + t)];
    }
    total_bounded += pr.bounded_count;
    rep.per_point.push_back(std::move(pr));
  }
  rep.fraction = static_cast<double>(total_bounded) / static_cast<double>(total_pairs);
  return rep;
}

}  // namespace germlab
