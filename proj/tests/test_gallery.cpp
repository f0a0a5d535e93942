#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "germlab/gallery.hpp"
#include "germlab/rotation_example.hpp"

using germlab::CirclePoint;
using germlab::Complex;
using germlab::ExampleId;
using germlab::MultiIndex;

namespace {
constexpr double kGolden = 0.6180339887498949;
}

TEST_CASE("example ids parse in short and long form") {
  REQUIRE(germlab::parse_example_id("L1") == ExampleId::L1);
  REQUIRE(germlab::parse_example_id("L1_linear_semineutral") == ExampleId::L1);
  REQUIRE(germlab::parse_example_id("R2_rotation_continuous") == ExampleId::R2);
  REQUIRE_THROWS_AS(germlab::parse_example_id("Z9"), std::invalid_argument);
}

TEST_CASE("semi-neutral germ pair atoms") {
  auto e2 = germlab::build_germ_example(ExampleId::E2);
  REQUIRE(e2.atom_count() == 2);
  REQUIRE(e2.probability(0) == 0.5);
  REQUIRE(e2.atom(0).coefficient(1, MultiIndex({0, 1})) == Complex(0.5, 0));
  REQUIRE(e2.atom(1).coefficient(0, MultiIndex({1, 1})) == Complex(1, 0));
}

TEST_CASE("linear pair atoms") {
  auto l1 = germlab::build_cocycle_example(ExampleId::L1);
  REQUIRE(l1.ensemble().size() == 2);
  REQUIRE(l1.ensemble().atom(0)(0, 0) == Complex(0.5, 0));
  REQUIRE(l1.ensemble().atom(0)(0, 1) == Complex(0, 0));
  REQUIRE(l1.ensemble().atom(1)(0, 1) == Complex(1, 0));
  REQUIRE(l1.ensemble().atom(1)(1, 1) == Complex(1, 0));
}

TEST_CASE("indexed family coefficients") {
  germlab::IndexedQuadraticFamily fam{0.5, 20};
  REQUIRE(fam.quadratic_coefficient(3) == std::ldexp(1.0, 24));  // a_3 = 2^24
  auto jet = fam.materialize(3);
  REQUIRE(jet.coefficient(0, MultiIndex({1})) == Complex(0.5, 0));
  REQUIRE(jet.coefficient(0, MultiIndex({2})) == Complex(std::ldexp(1.0, 24), 0));
  REQUIRE_THROWS_AS(fam.materialize(20), std::invalid_argument);  // overflows double
  REQUIRE(fam.tail_mass() == std::ldexp(1.0, -20));
}

TEST_CASE("second-coefficient recursion base cases") {
  REQUIRE(std::abs(germlab::e1_second_coefficient({0}, 0.5) - Complex(1, 0)) < 1e-15);
  REQUIRE(std::abs(germlab::e1_second_coefficient({0, 0}, 0.5) - Complex(0.75, 0)) < 1e-15);
}

TEST_CASE("second coefficient dominates the last injection term") {
  germlab::SplitMix64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> prefix;
    const int n = 1 + static_cast<int>(rng.next_u64() % 12);
    for (int k = 0; k < n; ++k) prefix.push_back(static_cast<int>(rng.next_u64() % 6));
    const double lambda1 = 0.3 + 0.5 * rng.next_double();
    const double log_c = germlab::e1_second_coefficient_log(prefix, lambda1);
    germlab::IndexedQuadraticFamily fam{lambda1, 60};
    const double lower = 2.0 * n * std::log(lambda1) +
                         fam.quadratic_coefficient_log(prefix.back());
    REQUIRE(log_c >= lower - 1e-9);
  }
}

TEST_CASE("blowup statistics are monotone in the horizon") {
  auto short_run = germlab::e1_blowup_statistics(0.5, 400, 100, 1e3, 7);
  auto long_run = germlab::e1_blowup_statistics(0.5, 400, 10000, 1e3, 7);
  REQUIRE(long_run.fraction >= short_run.fraction);
  REQUIRE(long_run.fraction > 0.0);

  auto zero_run = germlab::e1_blowup_statistics(0.5, 50, 0, 1e3, 7);
  REQUIRE(zero_run.fraction == 0.0);
}

TEST_CASE("index tail probability is near 2/n") {
  const double p = germlab::e1_tail_probability_estimate(100, 10000, 13);
  REQUIRE(p > 0.01);
  REQUIRE(p < 0.04);
}

TEST_CASE("adversarial orbit norms never decrease") {
  auto orbit = germlab::adversarial_orbit(Complex(0.1, 0.0), kGolden, 200000, 1.0);
  REQUIRE(orbit.min_growth_ratio >= 1.0 - 1e-14);
  REQUIRE(orbit.exit_step.has_value());

  germlab::SplitMix64 rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    auto [x, y] = rng.next_gaussian_pair();
    Complex z0(x, y);
    z0 *= 0.2 / std::abs(z0) * rng.next_double();
    if (z0 == Complex(0, 0)) continue;
    auto orb = germlab::adversarial_orbit(z0, kGolden, 3000, 1.0);
    REQUIRE(orb.min_growth_ratio >= 1.0 - 1e-14);
  }
}

TEST_CASE("adversarial tie-break applies the plus map on the imaginary axis") {
  auto orbit = germlab::adversarial_orbit(Complex(0.0, 0.01), kGolden, 1, 100.0);
  REQUIRE(orbit.strategy.size() == 1);
  REQUIRE(orbit.strategy[0] == 1);
  REQUIRE_THROWS_AS(germlab::adversarial_orbit(Complex(0, 0), kGolden, 10), std::invalid_argument);
}

TEST_CASE("tent cocycle identity f_k = phi_k - phi_k o T") {
  const int levels = 6;
  germlab::RotationTentCocycle cocycle(levels, kGolden);
  germlab::SplitMix64 rng(23);
  for (int k = 1; k <= levels; ++k) {
    for (int rep = 0; rep < 40; ++rep) {
      CirclePoint x;
      if (rep % 2 == 0) {
        x = CirclePoint{rng.next_double(), 0};
      } else {
        // Points inside a random interval of level k.
        const long long j =
            1 + static_cast<long long>(rng.next_u64() % static_cast<std::uint64_t>(
                                                            cocycle.interval_count(k)));
        const double u = 2.0 * rng.next_double() - 1.0;
        x = CirclePoint{0.98 * u * cocycle.epsilon(k), j - 1};
      }
      const double lhs = cocycle.f_level(k, x);
      const double rhs = cocycle.phi_level(k, x) - cocycle.phi_level(k, x.shifted(1));
      REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("tent integrals obey the 2^-k bound") {
  germlab::RotationTentCocycle cocycle(8, kGolden);
  for (int k = 1; k <= 8; ++k) {
    const double exact = cocycle.phi_level_integral_exact(k);
    const double quad = cocycle.phi_level_integral_quadrature(k);
    REQUIRE(std::abs(exact - quad) < 1e-12 * std::max(1.0, exact));
    REQUIRE(quad <= std::ldexp(1.0, -k) * (1.0 + 1e-6));
  }
}

TEST_CASE("phi attains the level value at the designated orbit point") {
  const int levels = 8;
  germlab::RotationTentCocycle cocycle(levels, kGolden);
  for (int k = 1; k <= levels; ++k) {
    const CirclePoint peak = cocycle.omega(cocycle.points_per_side(k) + 1);
    REQUIRE(cocycle.phi_level(k, peak) == static_cast<double>(k));
  }
}

TEST_CASE("cocycle products are bounded by exp(phi)") {
  const int levels = 6;
  germlab::RotationTentCocycle cocycle(levels, kGolden);
  germlab::SplitMix64 rng(29);
  for (int rep = 0; rep < 30; ++rep) {
    const CirclePoint x{rng.next_double(), 0};
    const double phi_x = cocycle.phi(x);
    for (long n : {1L, 7L, 40L}) {
      const double log_mn = cocycle.log_product(x, n);
      REQUIRE(log_mn <= phi_x + 1e-10);
      // Telescoping: log M^n = phi(x) - phi(T^n x).
      const double telescoped = phi_x - cocycle.phi(x.shifted(n));
      REQUIRE(std::abs(log_mn - telescoped) < 1e-10);
    }
  }
}

TEST_CASE("rotation cocycle evaluation record") {
  germlab::RotationTentCocycle cocycle(4, kGolden);
  const CirclePoint x{0.37, 0};
  auto eval = germlab::rotation_cocycle_eval(cocycle, x, 25);
  REQUIRE(eval.phi_partial >= 0.0);
  REQUIRE(eval.log_product <= eval.phi_partial + 1e-10);
  REQUIRE(std::abs(eval.f_partial - cocycle.f(x)) == 0.0);
}

TEST_CASE("interval separation failure reports the failing level") {
  // A rational angle collapses the orbit onto finitely many points, so the
  // disjointness search underflows and reports the level.
  REQUIRE_THROWS_AS(germlab::RotationTentCocycle(1, 1.0 / 3.0), std::runtime_error);
}

TEST_CASE("ensemble constructors validate their inputs") {
  using germlab::GermEnsemble;
  using germlab::Jet;
  Jet ok = Jet::identity(1, 4);
  REQUIRE_THROWS_AS(GermEnsemble(1, {ok}, {0.5}), std::invalid_argument);  // probs != 1
  REQUIRE_THROWS_AS(GermEnsemble(1, {ok, ok}, {-1.0, 2.0}), std::invalid_argument);

  Jet affine(1, 4);
  affine.set_coefficient(0, MultiIndex({0}), Complex(1, 0));
  REQUIRE_THROWS_AS(GermEnsemble(1, {affine}, {1.0}), std::invalid_argument);

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
  REQUIRE_THROWS_AS(germlab::MatrixEnsemble(2, {m, m}, {0.7, 0.7}), std::invalid_argument);
  REQUIRE_THROWS_AS(germlab::MatrixEnsemble(2, {}, {}), std::invalid_argument);
}

TEST_CASE("rotation example parameters are validated") {
  germlab::ExampleParams bad;
  bad.theta = 1.5;
  REQUIRE_THROWS_AS(germlab::build_cocycle_example(ExampleId::R2, bad), std::invalid_argument);
  REQUIRE_THROWS_AS(germlab::RotationTentCocycle(13, kGolden), std::invalid_argument);
  germlab::ExampleParams bad_l;
  bad_l.lambda1 = 1.0;
  REQUIRE_THROWS_AS(germlab::build_germ_example(ExampleId::E1, bad_l), std::invalid_argument);
}

TEST_CASE("build_example returns the right variant") {
  auto germ = germlab::build_example(ExampleId::E2);
  REQUIRE(std::holds_alternative<germlab::GermEnsemble>(germ));
  auto lin = germlab::build_example(ExampleId::L1);
  REQUIRE(std::holds_alternative<germlab::CocycleSpec>(lin));
}
