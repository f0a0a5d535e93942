// Acceptance suite: end-to-end checks of the laboratory against analytically
// known constants of its example systems, one pass/fail line per criterion.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "germlab/germlab.hpp"

using germlab::Complex;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Eigen::MatrixXcd random_unitary(germlab::SplitMix64& rng, int m) {
  Eigen::MatrixXcd g(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      auto [x, y] = rng.next_gaussian_pair();
      g(r, c) = Complex(x, y);
    }
  }
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
}

void criterion_1_l1_spectrum() {
  const auto start = std::chrono::steady_clock::now();
  auto spec = germlab::build_cocycle_example(germlab::ExampleId::L1);
  auto s = germlab::lyapunov_spectrum(spec, 10000, 100, 101);
  const double elapsed = seconds_since(start);
  const bool sizes = s.kappa.size() == 2;
  const double k1 = sizes ? s.kappa[0] : 1e9;
  const double k2 = sizes ? s.kappa[1] : 1e9;
  const bool pass = sizes && std::abs(k1) <= 0.02 && std::abs(k2 + std::log(2.0)) <= 0.02 &&
                    elapsed < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "kappa = (%.5f, %.5f), target (0, -log 2), %.2f s", k1, k2,
                elapsed);
  report(1, "L1 spectrum", pass, buf);
}

void criterion_2_e2_spectrum() {
  auto germs = germlab::build_germ_example(germlab::ExampleId::E2);
  germlab::CocycleSpec spec(germs.linear_part_ensemble());
  auto s = germlab::lyapunov_spectrum(spec, 10000, 100, 102);
  auto verdict = germlab::classify_germ_measure(germs, 10000, 100, 102);
  const bool sizes = s.kappa.size() == 2;
  const double k1 = sizes ? s.kappa[0] : 1e9;
  const double k2 = sizes ? s.kappa[1] : 1e9;
  const bool pass = sizes && std::abs(k1) <= 0.02 &&
                    std::abs(k2 - 0.5 * std::log(0.5)) <= 0.02 &&
                    verdict.verdict == germlab::Verdict::SemiNeutral;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "kappa = (%.5f, %.5f), target (0, -0.34657), verdict %s", k1,
                k2, germlab::to_string(verdict.verdict));
  report(2, "E2 spectrum and verdict", pass, buf);
}

void criterion_3_det_identity() {
  auto l1 = germlab::build_cocycle_example(germlab::ExampleId::L1);
  auto rep = germlab::det_identity_residual(l1, 10000, 100, 103);
  bool pass = !rep.divergent && rep.residual <= 0.03;
  double worst = rep.residual;

  germlab::SplitMix64 rng(1003);
  int generated = 0;
  while (generated < 5) {
    std::vector<Eigen::MatrixXcd> atoms;
    for (int a = 0; a < 2; ++a) {
      Eigen::MatrixXcd g(2, 2);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          auto [x, y] = rng.next_gaussian_pair();
          g(r, c) = Complex(x, y);
        }
      }
      atoms.push_back(g);
    }
    if (std::abs(atoms[0].determinant()) < 0.05 || std::abs(atoms[1].determinant()) < 0.05) {
      continue;  // keep the test away from accidental near-singularity
    }
    ++generated;
    germlab::CocycleSpec spec(germlab::MatrixEnsemble(2, atoms, {0.5, 0.5}));
    auto r = germlab::det_identity_residual(spec, 10000, 20, 103 + generated);
    worst = std::max(worst, r.residual);
    pass = pass && !r.divergent && r.residual <= 0.03;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst residual %.4g (bound 0.03)", worst);
  report(3, "determinant identity", pass, buf);
}

void criterion_4_oseledec_consistency() {
  auto l1 = germlab::build_cocycle_example(germlab::ExampleId::L1);
  const long n = 10000;
  double worst = 0.0;
  bool pass = true;
  for (long trial = 0; trial < 5; ++trial) {
    const std::uint64_t stream = germlab::split_seed(104, static_cast<std::uint64_t>(trial));
    auto sample = germlab::sample_product(l1, n, stream);
    Eigen::MatrixXcd lam = germlab::oseledec_matrix(l1, stream, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lam);
    for (int i = 0; i < 2; ++i) {
      const double from_matrix = std::log(es.eigenvalues()(1 - i));  // descending
      const double from_sample = sample.log_singular_values[static_cast<std::size_t>(i)] /
                                 static_cast<double>(n);
      worst = std::max(worst, std::abs(from_matrix - from_sample));
    }
  }
  pass = worst <= 1e-2;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "max |eigenlog - per-trial kappa| = %.3g (bound 1e-2)", worst);
  report(4, "Oseledec consistency", pass, buf);
}

void criterion_5_invariant_form() {
  germlab::SplitMix64 rng(105);
  bool pass = true;
  double worst_residual = 0.0;
  double worst_unitarity = 0.0;
  double worst_time = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    // cond(H) log-uniform in [1, 1e3].
    const double cond = std::pow(10.0, 3.0 * rng.next_double());
    Eigen::MatrixXcd q1 = random_unitary(rng, 2);
    Eigen::MatrixXcd q2 = random_unitary(rng, 2);
    Eigen::VectorXd sv(2);
    sv << 1.0, 1.0 / cond;
    Eigen::MatrixXcd h = q1 * sv.asDiagonal() * q2;
    std::vector<Eigen::MatrixXcd> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(h * random_unitary(rng, 2) * h.inverse());

    const auto start = std::chrono::steady_clock::now();
    auto res = germlab::find_invariant_form(gens, 10000, 1e-8);
    worst_time = std::max(worst_time, seconds_since(start));
    worst_residual = std::max(worst_residual, res.residual);
    const double defect = res.success
                              ? germlab::conjugated_unitarity_defect(gens, res.form)
                              : 1e9;
    worst_unitarity = std::max(worst_unitarity, defect);
    pass = pass && res.success && res.residual <= 1e-8 && defect <= 1e-6 &&
           worst_time < 5.0;
  }

  Eigen::MatrixXcd shear(2, 2);
  shear << 1, 1, 0, 1;
  const auto start = std::chrono::steady_clock::now();
  auto fail_res = germlab::find_invariant_form({shear}, 10000, 1e-8);
  worst_time = std::max(worst_time, seconds_since(start));
  pass = pass && !fail_res.success && worst_time < 5.0;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "residual <= %.2g, unitarity <= %.2g, shear %s, worst case %.2f s",
                worst_residual, worst_unitarity, fail_res.success ? "SUCCEEDED(!)" : "fails",
                worst_time);
  report(5, "invariant form", pass, buf);
}

void criterion_6_norm_floor() {
  auto l1 = germlab::build_cocycle_example(germlab::ExampleId::L1);
  auto res = germlab::min_product_norm(l1, 1000, 1000, 106);
  const bool pass = res.min_norm >= 1.0 - 1e-10;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "min ||M^n|| = %.12f (floor 1 - 1e-10)", res.min_norm);
  report(6, "semi-neutral norm floor", pass, buf);
}

void criterion_7_e2_boundedness() {
  auto e2 = germlab::build_germ_example(germlab::ExampleId::E2);
  auto rep = germlab::fatou_membership(e2, 0.05, 20, 10000, 50, 107);
  bool pass = rep.fraction == 1.0;

  // Exact halving law, checked at every step of fresh sampled orbits while
  // the value stays in the normal range (below ~1e-280 the halvings round in
  // the subnormal lattice and the law holds only up to that quantization),
  // plus the aggregated f-choice frequency.
  long ulp_violations = 0;
  long law_checks = 0;
  double alpha_sum = 0.0;
  const long law_orbits = 200;
  const long n = 10000;
  for (long t = 0; t < law_orbits; ++t) {
    germlab::SplitMix64 point_rng(germlab::split_seed(207, 0x70ULL, static_cast<std::uint64_t>(t)));
    Eigen::VectorXcd z = germlab::sample_ball(point_rng, 2, 1.0) * 0.05;
    const double w0 = std::abs(z[1]);
    germlab::SplitMix64 rng(germlab::split_seed(207, static_cast<std::uint64_t>(t)));
    long alpha = 0;
    for (long k = 1; k <= n; ++k) {
      const std::size_t atom = e2.sample_index(rng);
      z = e2.apply_atom(atom, z);
      if (atom == 0) ++alpha;
      const double expected = std::ldexp(w0, static_cast<int>(-alpha));
      if (expected < 1e-280) continue;
      ++law_checks;
      const double actual = std::abs(z[1]);
      if (actual > std::nextafter(expected, INFINITY) ||
          actual < std::nextafter(expected, -INFINITY)) {
        ++ulp_violations;
      }
    }
    alpha_sum += static_cast<double>(alpha) / static_cast<double>(n);
  }
  const double alpha_frac = alpha_sum / static_cast<double>(law_orbits);
  pass = pass && ulp_violations == 0 && alpha_frac >= 0.48 && alpha_frac <= 0.52;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "fraction %.3f, ulp violations %ld/%ld, alpha(n)/n = %.4f",
                rep.fraction, ulp_violations, law_checks, alpha_frac);
  report(7, "E2 boundedness and exact law", pass, buf);
}

void criterion_8_trapping() {
  germlab::Jet f(1, 8);
  f.set_coefficient(0, germlab::MultiIndex({1}), Complex(0.5, 0));
  f.set_coefficient(0, germlab::MultiIndex({2}), Complex(1, 0));
  germlab::GermEnsemble ens(1, {f}, {1.0});
  auto rep = germlab::trapping_radius(ens, 0.1, 4000, 108);
  bool pass = rep.epsilon == 0.1 && std::abs(rep.radius - 0.1) <= 1e-9 && rep.violations == 0;

  long converged = 0;
  const long orbits = 1000;
  for (long t = 0; t < orbits; ++t) {
    germlab::SplitMix64 rng(germlab::split_seed(108, static_cast<std::uint64_t>(t)));
    Eigen::VectorXcd z = germlab::sample_ball(rng, 1, rep.radius / 2.0);
    auto orbit = germlab::simulate_orbit(ens, z, 100, germlab::split_seed(208, static_cast<std::uint64_t>(t)));
    if (!orbit.escape_step && orbit.points.back().norm() < 1e-8) ++converged;
  }
  pass = pass && converged == orbits;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "epsilon %.3f, r %.10f, boundary violations %ld, converged %ld/%ld",
                rep.epsilon, rep.radius, rep.violations, converged, orbits);
  report(8, "attracting trap", pass, buf);
}

void criterion_9_jet_laws() {
  germlab::Jet g(2, 8);
  g.set_coefficient(0, germlab::MultiIndex({1, 0}), Complex(1, 0));
  g.set_coefficient(0, germlab::MultiIndex({1, 1}), Complex(1, 0));
  g.set_coefficient(1, germlab::MultiIndex({0, 1}), Complex(1, 0));
  bool pass = true;
  germlab::Jet it = germlab::Jet::identity(2, 8);
  for (long k = 1; k <= 50; ++k) {
    it = germlab::jet_compose(g, it);
    if (it.coefficient(0, germlab::MultiIndex({1, 1})) != Complex(static_cast<double>(k), 0)) {
      pass = false;
      break;
    }
  }

  germlab::SplitMix64 rng(109);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    germlab::Jet jets[3] = {germlab::Jet(2, 8), germlab::Jet(2, 8), germlab::Jet(2, 8)};
    for (auto& jet : jets) {
      for (int c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < jet.basis().size(); ++k) {
          const int deg = jet.basis().monomial(k).degree();
          if (deg == 0) continue;
          auto [x, y] = rng.next_gaussian_pair();
          jet.component(c).set_coefficient(k, Complex(x, y) * (0.35 * std::pow(0.5, deg)));
        }
      }
    }
    germlab::Jet left = germlab::jet_compose(germlab::jet_compose(jets[0], jets[1]), jets[2]);
    germlab::Jet right = germlab::jet_compose(jets[0], germlab::jet_compose(jets[1], jets[2]));
    for (int c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < left.basis().size(); ++k) {
        const Complex a = left.component(c).coefficient(k);
        const Complex b = right.component(c).coefficient(k);
        worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
      }
    }
  }
  pass = pass && worst <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "zw-coefficient exact for n <= 50, associativity defect %.3g (bound 1e-12)",
                worst);
  report(9, "jet laws", pass, buf);
}

void criterion_10_adversarial() {
  const double golden = 0.6180339887498949;
  germlab::SplitMix64 rng(110);
  double worst_ratio = 2.0;
  bool pass = true;
  for (int rep = 0; rep < 1000; ++rep) {
    auto [x, y] = rng.next_gaussian_pair();
    Complex z0(x, y);
    if (z0 == Complex(0, 0)) continue;
    z0 *= 0.2 * rng.next_double() / std::abs(z0);
    if (z0 == Complex(0, 0)) continue;
    auto orbit = germlab::adversarial_orbit(z0, golden, 5000, 1.0);
    worst_ratio = std::min(worst_ratio, orbit.min_growth_ratio);
  }
  pass = worst_ratio >= 1.0 - 1e-14;

  auto escape = germlab::adversarial_orbit(Complex(0.1, 0.0), golden, 1000000, 1.0);
  pass = pass && escape.exit_step.has_value();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "min growth ratio %.16f, |z0|=0.1 exits at step %ld",
                worst_ratio, escape.exit_step ? *escape.exit_step : -1L);
  report(10, "adversarial monotonicity", pass, buf);
}

void criterion_11_rotation_cocycle() {
  const double golden = 0.6180339887498949;
  const int levels = 10;
  germlab::RotationTentCocycle cocycle(levels, golden);
  germlab::SplitMix64 rng(111);

  double worst_identity = 0.0;
  for (int k = 1; k <= levels; ++k) {
    for (int rep = 0; rep < 100; ++rep) {
      germlab::CirclePoint x;
      if (rep % 2 == 0) {
        x = germlab::CirclePoint{rng.next_double(), 0};
      } else {
        const long long j = 1 + static_cast<long long>(
                                    rng.next_u64() %
                                    static_cast<std::uint64_t>(cocycle.interval_count(k)));
        x = germlab::CirclePoint{0.98 * (2.0 * rng.next_double() - 1.0) * cocycle.epsilon(k),
                                 j - 1};
      }
      const double lhs = cocycle.f_level(k, x);
      const double rhs = cocycle.phi_level(k, x) - cocycle.phi_level(k, x.shifted(1));
      worst_identity = std::max(worst_identity, std::abs(lhs - rhs));
    }
  }
  bool pass = worst_identity <= 1e-12;

  bool integrals_ok = true;
  for (int k = 1; k <= levels; ++k) {
    if (cocycle.phi_level_integral_quadrature(k) > std::ldexp(1.0, -k) * (1.0 + 1e-6)) {
      integrals_ok = false;
    }
  }
  pass = pass && integrals_ok;

  bool bound_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    const germlab::CirclePoint x{rng.next_double(), 0};
    const double phi_x = cocycle.phi(x);
    for (long nn : {3L, 20L, 100L}) {
      if (cocycle.log_product(x, nn) > phi_x + 1e-10) bound_ok = false;
    }
  }
  pass = pass && bound_ok;

  const double peak = cocycle.phi_level(levels, cocycle.omega(cocycle.points_per_side(levels) + 1));
  pass = pass && peak == static_cast<double>(levels);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "identity defect %.2g (bound 1e-12), integrals %s, M^n <= e^phi %s, phi peak %g",
                worst_identity, integrals_ok ? "ok" : "VIOLATED",
                bound_ok ? "ok" : "VIOLATED", peak);
  report(11, "rotation cocycle", pass, buf);
}

void criterion_12_stable_sets() {
  bool pass = true;
  char detail[240] = "";

  // Deterministic (z, w/2): limit (z, 0); the level line through
  // (0.1, 0.05) fixes the first coordinate.
  {
    germlab::Jet f(2, 8);
    f.set_coefficient(0, germlab::MultiIndex({1, 0}), Complex(1, 0));
    f.set_coefficient(1, germlab::MultiIndex({0, 1}), Complex(0.5, 0));
    germlab::GermEnsemble ens(2, {f}, {1.0});
    auto est = germlab::limit_map_estimate(ens, 112, 0.1, 33, 50, 1e-6, 10000);
    pass = pass && est.converged;
    if (est.converged) {
      Eigen::Vector2cd z(Complex(0.1, 0), Complex(0.05, 0));
      auto set = germlab::stable_set(est, z, 1e-4);
      double hausdorff = 0.0;
      for (const auto& p : set.points) {
        hausdorff = std::max(hausdorff, std::abs(p[0].real() - 0.1));
      }
      // Every grid node on the true line must appear: 33 nodes at x = 0.1.
      pass = pass && set.points.size() == 33 && hausdorff <= 1e-3;
      auto profile = germlab::rank_profile(est, 1e-3);
      pass = pass && profile.sigma1_at_origin >= 1.0 - 1e-3 && profile.max_sigma_min <= 1e-3;
      std::snprintf(detail, sizeof(detail), "diag: %zu pts, dev %.2g; ",
                    set.points.size(), hausdorff);
    }
  }

  // Printed linear pair: limits (a w, w); the level line through (0.1, 0.05)
  // fixes the second coordinate at 0.05.
  {
    auto l1 = germlab::build_cocycle_example(germlab::ExampleId::L1);
    auto germs = germlab::to_germ_ensemble(l1.ensemble());
    auto est = germlab::limit_map_estimate(germs, 112, 0.1, 33, 50, 1e-3, 10000);
    pass = pass && est.converged;
    if (est.converged) {
      Eigen::Vector2cd z(Complex(0.1, 0), Complex(0.05, 0));
      auto set = germlab::stable_set(est, z, 1e-4);
      double hausdorff = 0.0;
      for (const auto& p : set.points) {
        hausdorff = std::max(hausdorff, std::abs(p[1].real() - 0.05));
      }
      pass = pass && set.points.size() == 33 && hausdorff <= 1e-3;
      auto profile = germlab::rank_profile(est, 1e-3);
      pass = pass && profile.sigma1_at_origin >= 1.0 - 1e-3 && profile.max_sigma_min <= 1e-3;
      const std::size_t len = std::strlen(detail);
      std::snprintf(detail + len, sizeof(detail) - len,
                    "L1: %zu pts, dev %.2g, cauchy pair (%ld, %ld), sigma=(%.4f, %.2g)",
                    set.points.size(), hausdorff, est.n_first, est.n_second,
                    profile.sigma1_at_origin, profile.max_sigma_min);
    }
  }
  report(12, "stable sets", pass, detail);
}

void criterion_13_blowup_trend() {
  // Blowup past 1e3 within 100 steps is nearly certain (survival probability
  // about 4.6e-4), so resolving the strict trend takes a large trial count;
  // early exit at the threshold keeps this cheap.
  auto short_run = germlab::e1_blowup_statistics(0.5, 200000, 100, 1e3, 113);
  auto long_run = germlab::e1_blowup_statistics(0.5, 200000, 10000, 1e3, 113);
  const double p100 = germlab::e1_tail_probability_estimate(100, 10000, 113);
  const bool pass = long_run.fraction > short_run.fraction && p100 >= 0.01 && p100 <= 0.04;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "fraction %.4f @ 1e2 -> %.4f @ 1e4, p_100 = %.4f (band [0.01, 0.04])",
                short_run.fraction, long_run.fraction, p100);
  report(13, "E1 blowup trend", pass, buf);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  void (*criteria[])() = {
      criterion_1_l1_spectrum,  criterion_2_e2_spectrum,   criterion_3_det_identity,
      criterion_4_oseledec_consistency, criterion_5_invariant_form, criterion_6_norm_floor,
      criterion_7_e2_boundedness, criterion_8_trapping,    criterion_9_jet_laws,
      criterion_10_adversarial, criterion_11_rotation_cocycle, criterion_12_stable_sets,
      criterion_13_blowup_trend};
  for (auto* criterion : criteria) criterion();
  std::printf("%d/13 criteria passed in %.1f s\n", 13 - g_failures,
              seconds_since(start));
  return g_failures;
}
