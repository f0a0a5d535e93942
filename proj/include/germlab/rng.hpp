#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace germlab {

using Complex = std::complex<double>;

/// SplitMix64 stream. All randomness in the library flows through this
/// generator so that runs are reproducible from (master seed, trial index)
/// alone. The mixing constants below are part of the output format: any
/// implementation that uses them reproduces identical streams.
///
///   gamma = 0x9E3779B97F4A7C15
///   m1    = 0xBF58476D1CE4E5B9
///   m2    = 0x94D049BB133111EB
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal pair via Box-Muller. Consumes two uniforms.
  std::pair<double, double> next_gaussian_pair() {
    double u1 = next_double();
    double u2 = next_double();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// Index into a cumulative probability table (categorical draw).
  std::size_t next_index(const std::vector<double>& cumulative) {
    const double u = next_double();
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
      if (u < cumulative[i]) return i;
    }
    return cumulative.empty() ? 0 : cumulative.size() - 1;
  }

 private:
  std::uint64_t state_;
};

/// Per-trial stream seed: SplitMix64 finalizer applied to
/// master + gamma * (index + 1). Published so external implementations can
/// reproduce every trial stream of a run.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Named substream (e.g. mesh points vs. atom draws) derived from a master
/// seed and a small tag. Equivalent to split_seed with the tag folded in.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t tag,
                                std::uint64_t index) {
  return split_seed(split_seed(master, tag), index);
}

/// Uniform point in the complex m-ball of radius `radius`: isotropic
/// direction from 2m gaussians, radius scaled by u^(1/2m).
inline Eigen::VectorXcd sample_ball(SplitMix64& rng, int dimension,
                                    double radius) {
  Eigen::VectorXcd dir(dimension);
  double norm2 = 0.0;
  for (int i = 0; i < dimension; ++i) {
    auto [a, b] = rng.next_gaussian_pair();
    dir[i] = std::complex<double>(a, b);
    norm2 += a * a + b * b;
  }
  const double nrm = std::sqrt(norm2);
  if (nrm == 0.0) return Eigen::VectorXcd::Zero(dimension);
  const double u = rng.next_double();
  const double r = radius * std::pow(u, 1.0 / (2.0 * dimension));
  return dir * (r / nrm);
}

}  // namespace germlab
