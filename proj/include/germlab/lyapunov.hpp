#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "germlab/product.hpp"

namespace germlab {

/// Runs fn(trial) for trial = 0..trials-1, optionally across threads.
/// Results are written into a preallocated slot per trial and aggregated by
/// the caller in ascending trial order, so output is bit-identical for any
/// thread count.
template <typename T>
std::vector<T> run_trials(long trials, int threads,
                          const std::function<T(long)>& fn) {
  std::vector<T> results(static_cast<std::size_t>(trials));
  if (threads <= 1 || trials < 2) {
    for (long t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = fn(t);
    return results;
  }
  const int nthreads = std::min<long>(threads, trials);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w]() {
      for (long t = w; t < trials; t += nthreads) {
        results[static_cast<std::size_t>(t)] = fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

struct ExponentEstimate {
  double kappa = 0.0;       // mean of n^-1 log||M^n|| over trials
  double stderr_ = 0.0;     // sample standard error of the mean
  long n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
};

/// Lyapunov exponent estimate. A trial whose product is the zero matrix
/// contributes -inf, which propagates into the mean (documented sentinel).
inline ExponentEstimate lyapunov_exponent(const CocycleSpec& spec, long n, long trials,
                                          std::uint64_t seed, int threads = 1) {
  if (n < 1 || trials < 1)
    throw std::invalid_argument("lyapunov_exponent: n and trials must be >= 1");
  auto values = run_trials<double>(trials, threads, [&](long t) {
    return sample_product(spec, n, split_seed(seed, static_cast<std::uint64_t>(t))).log_norm /
           static_cast<double>(n);
  });
  ExponentEstimate out;
  out.n = n;
  out.trials = trials;
  out.seed = seed;
  out.kappa = std::accumulate(values.begin(), values.end(), 0.0) /
              static_cast<double>(trials);
  if (trials > 1 && std::isfinite(out.kappa)) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.kappa) * (v - out.kappa);
    out.stderr_ = std::sqrt(ss / (static_cast<double>(trials) - 1.0) /
                            static_cast<double>(trials));
  }
  return out;
}

struct LyapunovSpectrum {
  std::vector<double> kappa;      // strictly decreasing after grouping
  std::vector<int> alpha;         // multiplicities, sum = dimension
  std::vector<double> stderr_;    // per-entry standard error
  long n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  double gap_threshold = 0.0;
};

/// Per-trial estimates kappa_i = n^-1 (i-th log singular value of M^n),
/// averaged across trials; adjacent means closer than gap_threshold merge
/// into one index with summed multiplicity.
inline LyapunovSpectrum lyapunov_spectrum(const CocycleSpec& spec, long n, long trials,
                                          std::uint64_t seed, double gap_threshold = 0.05,
                                          int threads = 1) {
  if (n < 1 || trials < 1)
    throw std::invalid_argument("lyapunov_spectrum: n and trials must be >= 1");
  if (!(gap_threshold > 0.0))
    throw std::invalid_argument("lyapunov_spectrum: gap_threshold must be > 0");
  const int m = spec.dimension();
  auto per_trial = run_trials<std::vector<double>>(trials, threads, [&](long t) {
    auto sample = sample_product(spec, n, split_seed(seed, static_cast<std::uint64_t>(t)));
    for (auto& v : sample.log_singular_values) v /= static_cast<double>(n);
    return sample.log_singular_values;
  });

  std::vector<double> mean(static_cast<std::size_t>(m), 0.0);
  for (const auto& v : per_trial) {
    for (int i = 0; i < m; ++i) mean[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)];
  }
  for (auto& v : mean) v /= static_cast<double>(trials);

  // Group adjacent indices whose means are within the threshold.
  LyapunovSpectrum out;
  out.n = n;
  out.trials = trials;
  out.seed = seed;
  out.gap_threshold = gap_threshold;
  int start = 0;
  while (start < m) {
    int end = start + 1;
    while (end < m && mean[static_cast<std::size_t>(end - 1)] - mean[static_cast<std::size_t>(end)] <
                          gap_threshold) {
      ++end;
    }
    // Per-trial entry value: mean over member indices of that trial's kappas.
    std::vector<double> entry_values(static_cast<std::size_t>(trials), 0.0);
    for (long t = 0; t < trials; ++t) {
      double s = 0.0;
      for (int i = start; i < end; ++i) {
        s += per_trial[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      }
      entry_values[static_cast<std::size_t>(t)] = s / static_cast<double>(end - start);
    }
    const double em = std::accumulate(entry_values.begin(), entry_values.end(), 0.0) /
                      static_cast<double>(trials);
    double se = 0.0;
    if (trials > 1 && std::isfinite(em)) {
      double ss = 0.0;
      for (double v : entry_values) ss += (v - em) * (v - em);
      se = std::sqrt(ss / (static_cast<double>(trials) - 1.0) / static_cast<double>(trials));
    }
    out.kappa.push_back(em);
    out.alpha.push_back(end - start);
    out.stderr_.push_back(se);
    start = end;
  }
  return out;
}

/// Estimate of the Oseledec limit: the 2n-th root of (M^n)* M^n, computed as
/// V diag(exp(s/n)) V* from the factored product. Hermitian positive
/// semidefinite; kernel directions give zero eigenvalues.
inline Eigen::MatrixXcd oseledec_matrix(const CocycleSpec& spec, std::uint64_t seed, long n) {
  if (n < 1) throw std::invalid_argument("oseledec_matrix: n must be >= 1");
  ProductAccumulator acc(spec.dimension());
  auto stream = spec.factor_stream(seed);
  for (long k = 0; k < n; ++k) acc.multiply(stream.next());
  const auto& s = acc.log_singular_values();
  const Eigen::MatrixXcd& v = acc.right_factor();
  Eigen::VectorXd roots(spec.dimension());
  for (int i = 0; i < spec.dimension(); ++i) {
    const double e = s[static_cast<std::size_t>(i)] / static_cast<double>(n);
    roots[i] = std::isfinite(e) ? std::exp(e) : 0.0;
  }
  return v * roots.asDiagonal() * v.adjoint();
}

struct DetIdentityReport {
  double kappa_sum = 0.0;       // estimated sum alpha_i kappa_i
  double expected_log_det = 0.0;  // exact probability-weighted sum over atoms
  double residual = 0.0;
  bool divergent = false;       // a non-invertible atom made the comparison -inf vs -inf
  long n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
};

/// | sum_i alpha_i kappa_i - E log|det M| | with the expectation exact over
/// the atoms. A non-invertible atom yields a defined-divergence report
/// rather than an exception.
inline DetIdentityReport det_identity_residual(const CocycleSpec& spec, long n, long trials,
                                               std::uint64_t seed, int threads = 1) {
  if (!spec.is_iid())
    throw std::invalid_argument("det_identity_residual: needs an i.i.d. driver");
  DetIdentityReport out;
  out.n = n;
  out.trials = trials;
  out.seed = seed;
  out.expected_log_det = spec.ensemble().expected_log_abs_det();
  if (!spec.ensemble().all_invertible()) {
    out.divergent = true;
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  auto values = run_trials<double>(trials, threads, [&](long t) {
    return sample_product(spec, n, split_seed(seed, static_cast<std::uint64_t>(t))).log_abs_det /
           static_cast<double>(n);
  });
  out.kappa_sum = std::accumulate(values.begin(), values.end(), 0.0) /
                  static_cast<double>(trials);
  out.residual = std::abs(out.kappa_sum - out.expected_log_det);
  return out;
}

struct MinNormResult {
  double min_norm = 0.0;      // exp(min log norm); may underflow to 0
  double min_log_norm = 0.0;
  long argmin_n = 0;
  long n_max = 0;
  long trials = 0;
  std::uint64_t seed = 0;
};

/// Minimum over trials and 1 <= n <= n_max of the operator 2-norm of M^n.
inline MinNormResult min_product_norm(const CocycleSpec& spec, long n_max, long trials,
                                      std::uint64_t seed, int threads = 1) {
  if (n_max < 1 || trials < 1)
    throw std::invalid_argument("min_product_norm: n_max and trials must be >= 1");
  struct TrialMin {
    double log_norm;
    long at;
  };
  auto mins = run_trials<TrialMin>(trials, threads, [&](long t) {
    ProductAccumulator acc(spec.dimension());
    auto stream = spec.factor_stream(split_seed(seed, static_cast<std::uint64_t>(t)));
    TrialMin best{std::numeric_limits<double>::infinity(), 0};
    for (long k = 1; k <= n_max; ++k) {
      acc.multiply(stream.next());
      const double ln = acc.log_norm_now();
      if (ln < best.log_norm) best = {ln, k};
    }
    return best;
  });
  MinNormResult out;
  out.n_max = n_max;
  out.trials = trials;
  out.seed = seed;
  out.min_log_norm = std::numeric_limits<double>::infinity();
  for (const auto& tm : mins) {
    if (tm.log_norm < out.min_log_norm) {
      out.min_log_norm = tm.log_norm;
      out.argmin_n = tm.at;
    }
  }
  out.min_norm = std::exp(out.min_log_norm);
  return out;
}

}  // namespace germlab
