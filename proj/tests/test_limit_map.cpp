#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <Eigen/Dense>

#include "germlab/gallery.hpp"
#include "germlab/limit_map.hpp"

using germlab::Complex;
using germlab::GermEnsemble;
using germlab::Jet;
using germlab::MultiIndex;

namespace {

GermEnsemble deterministic_diag() {  // (z, w/2)
  Jet f(2, 8);
  f.set_coefficient(0, MultiIndex({1, 0}), Complex(1, 0));
  f.set_coefficient(1, MultiIndex({0, 1}), Complex(0.5, 0));
  return GermEnsemble(2, {f}, {1.0});
}

}  // namespace

TEST_CASE("deterministic (z, w/2) converges to (z, 0)") {
  auto est = germlab::limit_map_estimate(deterministic_diag(), 1, 0.1, 17, 10, 1e-6, 1000);
  REQUIRE(est.converged);
  REQUIRE_FALSE(est.escaped);
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    REQUIRE(std::abs(est.values[i][0] - est.grid[i][0]) < 1e-12);
    REQUIRE(std::abs(est.values[i][1]) < 1e-8);
  }
}

TEST_CASE("variant linear pair converges with an omega-dependent shear limit") {
  auto l2 = germlab::build_cocycle_example(germlab::ExampleId::L2);
  auto germs = germlab::to_germ_ensemble(l2.ensemble());
  auto est = germlab::limit_map_estimate(germs, 5, 0.1, 17, 50, 1e-6, 5000);
  REQUIRE(est.converged);
  // Limit has the form (z + beta w, 0): read beta off a grid point and check
  // the whole grid against it.
  const double beta = (est.values[1 + 17 * 3][0] - est.grid[1 + 17 * 3][0]).real() /
                      est.grid[1 + 17 * 3][1].real();
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    const Complex expected = est.grid[i][0] + beta * est.grid[i][1];
    REQUIRE(std::abs(est.values[i][0] - expected) < 1e-5);
    REQUIRE(std::abs(est.values[i][1]) < 1e-5);
  }
  REQUIRE(beta >= 0.0);
  REQUIRE(beta < 2.0);
}

TEST_CASE("printed semi-neutral pair converges along a snapshot subsequence") {
  auto l1 = germlab::build_cocycle_example(germlab::ExampleId::L1);
  auto germs = germlab::to_germ_ensemble(l1.ensemble());
  auto est = germlab::limit_map_estimate(germs, 3, 0.1, 17, 50, 1e-3, 10000);
  REQUIRE(est.converged);
  REQUIRE(est.n_second > est.n_first);
  // Any limit point of f^n has the form (alpha w, w): z-dependence is dead.
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    REQUIRE(std::abs(est.values[i][1] - est.grid[i][1]) < 1e-12);
  }
}

TEST_CASE("semi-neutral germ pair converges to a rank-one limit") {
  auto e2 = germlab::build_germ_example(germlab::ExampleId::E2);
  auto est = germlab::limit_map_estimate(e2, 7, 0.05, 17, 50, 1e-6, 10000);
  REQUIRE(est.converged);
  auto profile = germlab::rank_profile(est, 1e-3);
  REQUIRE(profile.degenerate);
  REQUIRE(profile.nonvanishing);
  for (const auto& sv : profile.singular_values) {
    REQUIRE(sv(1) / sv(0) < 1e-3);
  }
}

TEST_CASE("rank profile flags") {
  auto est = germlab::limit_map_estimate(deterministic_diag(), 1, 0.1, 17, 10, 1e-6, 1000);
  auto profile = germlab::rank_profile(est);
  REQUIRE(profile.degenerate);
  REQUIRE(profile.nonvanishing);
  REQUIRE(std::abs(profile.sigma1_at_origin - 1.0) < 1e-6);
  for (const auto& sv : profile.singular_values) {
    REQUIRE(std::abs(sv(0) - 1.0) < 1e-6);
    REQUIRE(sv(1) < 1e-6);
  }

  // Negative control: the identity map converges to itself and is full rank.
  GermEnsemble id_ens(2, {Jet::identity(2, 8)}, {1.0});
  auto id_est = germlab::limit_map_estimate(id_ens, 1, 0.1, 9, 5, 1e-6, 100);
  REQUIRE(id_est.converged);
  auto id_profile = germlab::rank_profile(id_est);
  REQUIRE_FALSE(id_profile.degenerate);
}

TEST_CASE("stable sets of the deterministic ensemble are vertical lines") {
  auto est = germlab::limit_map_estimate(deterministic_diag(), 1, 0.1, 33, 10, 1e-8, 2000);
  REQUIRE(est.converged);
  Eigen::Vector2cd z(Complex(0.1, 0), Complex(0.05, 0));
  auto set = germlab::stable_set(est, z, 1e-4);
  REQUIRE(set.points.size() == 33);  // one full grid column
  for (const auto& p : set.points) {
    REQUIRE(std::abs(p[0] - Complex(0.1, 0)) < 1e-12);
  }
  REQUIRE(set.fit_residual < 1e-12);
}

TEST_CASE("stable sets of the variant pair are the lines z + beta w = const") {
  auto l2 = germlab::build_cocycle_example(germlab::ExampleId::L2);
  auto germs = germlab::to_germ_ensemble(l2.ensemble());
  auto est = germlab::limit_map_estimate(germs, 5, 0.1, 33, 50, 1e-8, 5000);
  REQUIRE(est.converged);
  Eigen::Vector2cd z(Complex(0.0, 0), Complex(0.0, 0));
  // The limit line is slanted, so the level tolerance must sit near the grid
  // spacing for off-axis nodes to register.
  auto set = germlab::stable_set(est, z, 3e-3);
  REQUIRE(set.points.size() >= 5);
  REQUIRE(set.fit_residual < 10.0 * set.level_tol);
}

TEST_CASE("stable set of the germ pair is a curve with a good line fit locally") {
  auto e2 = germlab::build_germ_example(germlab::ExampleId::E2);
  auto est = germlab::limit_map_estimate(e2, 7, 0.05, 33, 50, 1e-6, 10000);
  REQUIRE(est.converged);
  Eigen::Vector2cd z(Complex(0.025, 0), Complex(0.0125, 0));
  auto set = germlab::stable_set(est, z, 1e-4);
  REQUIRE_FALSE(set.points.empty());
  REQUIRE(set.fit_residual < 10.0 * set.level_tol);
}

TEST_CASE("level sets outside the valid region are reported") {
  auto est = germlab::limit_map_estimate(deterministic_diag(), 1, 0.1, 17, 10, 1e-8, 1000);
  Eigen::Vector2cd inside(Complex(0.0, 0), Complex(0.0, 0));
  REQUIRE(germlab::stable_set(est, inside, 1e-4).points.size() >= 1);
  Eigen::Vector2cd outside(Complex(5.0, 0), Complex(0.0, 0));
  REQUIRE_THROWS_AS(germlab::stable_set(est, outside, 1e-4), std::runtime_error);
}

TEST_CASE("non-converged estimates are rejected by downstream calls") {
  // The printed pair with an impossible tolerance never converges.
  auto l1 = germlab::build_cocycle_example(germlab::ExampleId::L1);
  auto germs = germlab::to_germ_ensemble(l1.ensemble());
  auto est = germlab::limit_map_estimate(germs, 3, 0.1, 9, 50, 1e-16, 2000);
  REQUIRE_FALSE(est.converged);
  REQUIRE_FALSE(est.defect_trajectory.empty());
  REQUIRE_THROWS_AS(germlab::rank_profile(est), std::invalid_argument);
  Eigen::Vector2cd z(Complex(0, 0), Complex(0, 0));
  REQUIRE_THROWS_AS(germlab::stable_set(est, z, 1e-4), std::invalid_argument);
}
