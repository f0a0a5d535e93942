#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "germlab/germ_ensemble.hpp"
#include "germlab/matrix_ensemble.hpp"
#include "germlab/rng.hpp"
#include "germlab/rotation_example.hpp"

namespace germlab {

/// Built-in example systems.
///   E1  countable attracting family  f_i(z) = l1 z + a_i z^2,  P(i) = 2^-i
///   E2  semi-neutral germ pair       (z, w/2) and (z + zw, w)
///   E3  neutral adversarial pair     lambda (z + z^2), lambda (z - z^2)
///   L1  linear semi-neutral pair     [[1/2,0],[0,1]], [[1/2,1],[0,1]]
///   L2  variant with limits (z + beta w, 0): [[1,0],[0,1/2]], [[1,1],[0,1/2]]
///       (reconstruction; the variant's intended pair is not printed
///       explicitly, this is the minimal strict-triangular analogue)
///   R1  rotation-driven scalar cocycle from an unbounded L1 potential
///   R2  rotation-driven scalar cocycle with the piecewise-linear tents
enum class ExampleId { E1, E2, E3, L1, L2, R1, R2 };

struct ExampleParams {
  double lambda1 = 0.5;                      // E1: linear part, in (0,1)
  double theta = 0.6180339887498949;         // R1/R2: rotation angle, in (0,1)
  double alpha = 0.6180339887498949;         // E3: rotation number, in (0,1)
  int levels = 10;                           // R2: tent truncation depth K <= 12
  int index_cap = 60;                        // E1: index distribution cap
  double escape_radius = 10.0;
  int degree = Jet::kDefaultDegree;
};

inline ExampleId parse_example_id(const std::string& name) {
  auto match = [&name](const char* shortname, const char* longname) {
    return name == shortname || name == longname;
  };
  if (match("E1", "E1_noncompact")) return ExampleId::E1;
  if (match("E2", "E2_semineutral_germs")) return ExampleId::E2;
  if (match("E3", "E3_neutral_adversarial")) return ExampleId::E3;
  if (match("L1", "L1_linear_semineutral")) return ExampleId::L1;
  if (match("L2", "L2_linear_semineutral_variant")) return ExampleId::L2;
  if (match("R1", "R1_rotation_simple")) return ExampleId::R1;
  if (match("R2", "R2_rotation_continuous")) return ExampleId::R2;
  throw std::invalid_argument("unknown example id: " + name);
}

inline const char* example_name(ExampleId id) {
  switch (id) {
    case ExampleId::E1: return "E1_noncompact";
    case ExampleId::E2: return "E2_semineutral_germs";
    case ExampleId::E3: return "E3_neutral_adversarial";
    case ExampleId::L1: return "L1_linear_semineutral";
    case ExampleId::L2: return "L2_linear_semineutral_variant";
    case ExampleId::R1: return "R1_rotation_simple";
    case ExampleId::R2: return "R2_rotation_continuous";
  }
  return "";
}

namespace gallery_detail {

inline void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in (0,1)");
}

}  // namespace gallery_detail

inline GermEnsemble build_germ_example(ExampleId id, const ExampleParams& p = {}) {
  switch (id) {
    case ExampleId::E1: {
      gallery_detail::check_unit_interval(p.lambda1, "lambda1");
      IndexedQuadraticFamily family;
      family.lambda1 = p.lambda1;
      family.cap = p.index_cap;
      return GermEnsemble(family, p.escape_radius);
    }
    case ExampleId::E2: {
      Jet f(2, p.degree);  // (z, w/2)
      f.set_coefficient(0, MultiIndex({1, 0}), Complex(1, 0));
      f.set_coefficient(1, MultiIndex({0, 1}), Complex(0.5, 0));
      Jet g(2, p.degree);  // (z + zw, w)
      g.set_coefficient(0, MultiIndex({1, 0}), Complex(1, 0));
      g.set_coefficient(0, MultiIndex({1, 1}), Complex(1, 0));
      g.set_coefficient(1, MultiIndex({0, 1}), Complex(1, 0));
      return GermEnsemble(2, {f, g}, {0.5, 0.5}, p.escape_radius);
    }
    case ExampleId::E3: {
      gallery_detail::check_unit_interval(p.alpha, "alpha");
      const Complex lambda = std::polar(1.0, 2.0 * M_PI * p.alpha);
      Jet f1(1, p.degree);  // lambda (z + z^2)
      f1.set_coefficient(0, MultiIndex({1}), lambda);
      f1.set_coefficient(0, MultiIndex({2}), lambda);
      Jet f2(1, p.degree);  // lambda (z - z^2)
      f2.set_coefficient(0, MultiIndex({1}), lambda);
      f2.set_coefficient(0, MultiIndex({2}), -lambda);
      return GermEnsemble(1, {f1, f2}, {0.5, 0.5}, p.escape_radius);
    }
    default:
      throw std::invalid_argument("example is not a germ ensemble; use build_cocycle_example");
  }
}

inline CocycleSpec build_cocycle_example(ExampleId id, const ExampleParams& p = {}) {
  switch (id) {
    case ExampleId::L1: {
      Eigen::MatrixXcd g(2, 2), h(2, 2);
      g << 0.5, 0.0, 0.0, 1.0;
      h << 0.5, 1.0, 0.0, 1.0;
      return CocycleSpec(MatrixEnsemble(2, {g, h}, {0.5, 0.5}));
    }
    case ExampleId::L2: {
      Eigen::MatrixXcd g(2, 2), h(2, 2);
      g << 1.0, 0.0, 0.0, 0.5;
      h << 1.0, 1.0, 0.0, 0.5;
      return CocycleSpec(MatrixEnsemble(2, {g, h}, {0.5, 0.5}));
    }
    case ExampleId::R1: {
      gallery_detail::check_unit_interval(p.theta, "theta");
      RotationDriver rot;
      rot.theta = p.theta;
      rot.dimension = 1;
      rot.family = "R1_rotation_simple";
      const double theta = p.theta;
      // phi(x) = 1/sqrt(x): nonnegative, unbounded, integrable on (0,1).
      rot.matrix_at = [theta](double x) {
        auto phi = [](double t) { return 1.0 / std::sqrt(std::max(t, 1e-300)); };
        const double tx = std::fmod(x + theta, 1.0);
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = std::exp(phi(x) - phi(tx));
        return m;
      };
      return CocycleSpec(rot);
    }
    case ExampleId::R2: {
      gallery_detail::check_unit_interval(p.theta, "theta");
      auto cocycle = std::make_shared<RotationTentCocycle>(p.levels, p.theta);
      RotationDriver rot;
      rot.theta = p.theta;
      rot.dimension = 1;
      rot.family = "R2_rotation_continuous";
      rot.levels = p.levels;
      rot.matrix_at = [cocycle](double x) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = std::exp(cocycle->f(CirclePoint{x, 0}));
        return m;
      };
      return CocycleSpec(rot);
    }
    default:
      throw std::invalid_argument("example is not a cocycle spec; use build_germ_example");
  }
}

inline std::variant<GermEnsemble, CocycleSpec> build_example(ExampleId id,
                                                             const ExampleParams& p = {}) {
  switch (id) {
    case ExampleId::E1:
    case ExampleId::E2:
    case ExampleId::E3:
      return build_germ_example(id, p);
    default:
      return build_cocycle_example(id, p);
  }
}

/// z^2-coefficient of the n-fold composition along a fixed index prefix, by
/// the exact recursion c_n = l1 c_{n-1} + a_{i_n} l1^(2(n-1)), tracked in log
/// space so huge coefficients stay meaningful (returned value saturates to
/// +inf past double range). Index 0 denotes the unit-coefficient member
/// a_0 = 1; family members use a_i = l1^(-3 2^i).
inline Complex e1_second_coefficient(const std::vector<int>& index_prefix, double lambda1) {
  gallery_detail::check_unit_interval(lambda1, "lambda1");
  IndexedQuadraticFamily family;
  family.lambda1 = lambda1;
  const double log_l = std::log(lambda1);
  double log_c = -std::numeric_limits<double>::infinity();  // c_0 = 0
  long n = 0;
  for (int idx : index_prefix) {
    if (idx < 0) throw std::invalid_argument("e1_second_coefficient: negative index");
    ++n;
    const double inject = family.quadratic_coefficient_log(idx) +
                          2.0 * static_cast<double>(n - 1) * log_l;
    const double grow = log_c + log_l;
    const double hi = std::max(inject, grow);
    log_c = std::isfinite(hi) ? hi + std::log1p(std::exp(std::min(inject, grow) - hi))
                              : hi;
  }
  return Complex(std::exp(log_c), 0.0);
}

/// Same recursion, log value only (for blowup bookkeeping).
inline double e1_second_coefficient_log(const std::vector<int>& index_prefix, double lambda1) {
  const Complex c = e1_second_coefficient(index_prefix, lambda1);
  return std::log(std::abs(c));
}

struct BlowupStatistics {
  double fraction = 0.0;  // trials where max_n |c_n| exceeded the threshold
  long trials = 0;
  long horizon = 0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
};

/// Monte Carlo fraction of index sequences whose second coefficient exceeds
/// the threshold within the horizon. Per-trial streams extend
/// deterministically, so the fraction is nondecreasing in the horizon for a
/// fixed seed.
inline BlowupStatistics e1_blowup_statistics(double lambda1, long trials, long horizon,
                                             double threshold, std::uint64_t seed,
                                             int index_cap = 60) {
  gallery_detail::check_unit_interval(lambda1, "lambda1");
  if (trials < 1 || horizon < 0)
    throw std::invalid_argument("e1_blowup_statistics: bad trial/horizon counts");
  IndexedQuadraticFamily family;
  family.lambda1 = lambda1;
  family.cap = index_cap;
  const auto probs = family.index_probabilities();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cumulative[i] = acc;
  }
  const double log_l = std::log(lambda1);
  const double log_threshold = std::log(threshold);

  long blown = 0;
  for (long t = 0; t < trials; ++t) {
    SplitMix64 rng(split_seed(seed, static_cast<std::uint64_t>(t)));
    double log_c = -std::numeric_limits<double>::infinity();
    for (long n = 1; n <= horizon; ++n) {
      const int idx = static_cast<int>(rng.next_index(cumulative)) + 1;
      const double inject = family.quadratic_coefficient_log(idx) +
                            2.0 * static_cast<double>(n - 1) * log_l;
      const double grow = log_c + log_l;
      const double hi = std::max(inject, grow);
      log_c = std::isfinite(hi) ? hi + std::log1p(std::exp(std::min(inject, grow) - hi))
                                : hi;
      if (log_c > log_threshold) {
        ++blown;
        break;
      }
    }
  }
  BlowupStatistics out;
  out.fraction = static_cast<double>(blown) / static_cast<double>(trials);
  out.trials = trials;
  out.horizon = horizon;
  out.threshold = threshold;
  out.seed = seed;
  return out;
}

/// Empirical estimate of p_n = P(a_{i_n} l1^(2n) >= l1^(-n)), i.e. of drawing
/// an index >= log2(n) at step n.
inline double e1_tail_probability_estimate(long n, long trials, std::uint64_t seed,
                                           double lambda1 = 0.5, int index_cap = 60) {
  IndexedQuadraticFamily family;
  family.lambda1 = lambda1;
  family.cap = index_cap;
  const auto probs = family.index_probabilities();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cumulative[i] = acc;
  }
  const int cutoff = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    SplitMix64 rng(split_seed(seed, static_cast<std::uint64_t>(t)));
    int last = 0;
    for (long k = 0; k < n; ++k) last = static_cast<int>(rng.next_index(cumulative)) + 1;
    if (last >= cutoff) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

struct AdversarialOrbit {
  std::vector<double> norms;     // |z_i|, i = 0..steps
  std::vector<char> strategy;    // 1 or 2: which map was applied at step i
  std::optional<long> exit_step; // first step with |z| > exit_threshold
  double min_growth_ratio = 0.0; // min over steps of |z_{i+1}| / |z_i|
  long steps = 0;
};

/// Deterministic adversarial orbit under f1 = lambda (z + z^2),
/// f2 = lambda (z - z^2) with lambda = exp(2 pi i alpha): apply f1 when
/// Re z >= 0 (ties choose f1), else f2. Every step satisfies
/// |z_{i+1}| >= |z_i| exactly (up to roundoff); the recorded ratios let
/// callers verify the inequality at 1-ulp slack.
inline AdversarialOrbit adversarial_orbit(Complex z0, double alpha, long max_steps,
                                          double exit_threshold = 1.0) {
  if (z0 == Complex(0, 0)) throw std::invalid_argument("adversarial_orbit: z0 must be nonzero");
  gallery_detail::check_unit_interval(alpha, "alpha");
  const Complex lambda = std::polar(1.0, 2.0 * M_PI * alpha);

  AdversarialOrbit out;
  out.min_growth_ratio = std::numeric_limits<double>::infinity();
  Complex z = z0;
  out.norms.push_back(std::abs(z));
  for (long i = 0; i < max_steps; ++i) {
    const bool use_plus = z.real() >= 0.0;
    const Complex z2 = z * z;
    z = lambda * (use_plus ? z + z2 : z - z2);
    out.strategy.push_back(use_plus ? 1 : 2);
    const double nrm = std::abs(z);
    out.norms.push_back(nrm);
    out.min_growth_ratio = std::min(out.min_growth_ratio,
                                    nrm / out.norms[out.norms.size() - 2]);
    ++out.steps;
    if (nrm > exit_threshold) {
      out.exit_step = i + 1;
      break;
    }
  }
  return out;
}

}  // namespace germlab
