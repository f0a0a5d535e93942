#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "germlab/germ_ensemble.hpp"
#include "germlab/lyapunov.hpp"

namespace germlab {

enum class Verdict { Attracting, Repelling, Neutral, SemiNeutral, Undetermined };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Attracting: return "Attracting";
    case Verdict::Repelling: return "Repelling";
    case Verdict::Neutral: return "Neutral";
    case Verdict::SemiNeutral: return "SemiNeutral";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

struct Classification {
  Verdict verdict = Verdict::Undetermined;
  double kappa_hat = 0.0;
  double stderr_ = 0.0;
  double expected_log_det = 0.0;  // exact from atoms; -inf for singular atoms
  double eps_abs = 1e-3;
  long n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
};

/// Four-way classification of an i.i.d. matrix ensemble. The top exponent
/// decides when its 3-standard-error interval excludes [-eps_abs, eps_abs]
/// entirely; otherwise the exact E log|det| splits Neutral from SemiNeutral,
/// and anything inconsistent stays Undetermined. A non-invertible atom sends
/// E log|det| to -inf, so the verdict falls to the kappa branch alone
/// (Attracting or Repelling when decisive, else SemiNeutral).
inline Classification classify_ensemble(const CocycleSpec& spec, long n, long trials,
                                        std::uint64_t seed, double eps_abs = 1e-3,
                                        int threads = 1) {
  if (!spec.is_iid())
    throw std::invalid_argument("classify_ensemble: needs an i.i.d. driver");
  Classification out;
  out.eps_abs = eps_abs;
  out.n = n;
  out.trials = trials;
  out.seed = seed;
  out.expected_log_det = spec.ensemble().expected_log_abs_det();

  const ExponentEstimate est = lyapunov_exponent(spec, n, trials, seed, threads);
  out.kappa_hat = est.kappa;
  out.stderr_ = est.stderr_;

  const double lo = est.kappa - 3.0 * est.stderr_;
  const double hi = est.kappa + 3.0 * est.stderr_;
  if (lo > eps_abs) {
    out.verdict = Verdict::Repelling;
  } else if (hi < -eps_abs) {
    out.verdict = Verdict::Attracting;
  } else {
    // Statistically indistinguishable from zero.
    if (out.expected_log_det < -eps_abs) {
      out.verdict = Verdict::SemiNeutral;
    } else if (std::abs(out.expected_log_det) <= eps_abs) {
      out.verdict = Verdict::Neutral;
    } else {
      out.verdict = Verdict::Undetermined;  // kappa ~ 0 but E log|det| > 0
    }
  }
  return out;
}

/// Classification of a germ ensemble: push forward through the linear part
/// and classify the resulting matrix ensemble with the same parameters, so
/// the verdict matches the matrix route bit for bit.
inline Classification classify_germ_measure(const GermEnsemble& ensemble, long n, long trials,
                                            std::uint64_t seed, double eps_abs = 1e-3,
                                            int threads = 1) {
  return classify_ensemble(CocycleSpec(ensemble.linear_part_ensemble()), n, trials, seed,
                           eps_abs, threads);
}

}  // namespace germlab
