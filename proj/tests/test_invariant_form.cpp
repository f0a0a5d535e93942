#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "germlab/invariant_form.hpp"
#include "germlab/rng.hpp"

#include <stdexcept>

using germlab::Complex;

namespace {

Eigen::MatrixXcd rotation2(double angle) {
  Eigen::MatrixXcd r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
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

/// Invertible H with prescribed condition number via random unitaries.
Eigen::MatrixXcd conditioned_matrix(germlab::SplitMix64& rng, int m, double cond) {
  Eigen::MatrixXcd q1 = random_unitary(rng, m);
  Eigen::MatrixXcd q2 = random_unitary(rng, m);
  Eigen::VectorXd sv(m);
  for (int i = 0; i < m; ++i) {
    sv(i) = std::pow(cond, -static_cast<double>(i) / std::max(1, m - 1));
  }
  return q1 * sv.asDiagonal() * q2;
}

}  // namespace

TEST_CASE("unitary generators keep the identity form") {
  std::vector<Eigen::MatrixXcd> gens = {rotation2(0.3), rotation2(1.1)};
  auto res = germlab::find_invariant_form(gens, 1000, 1e-10);
  REQUIRE(res.success);
  REQUIRE((res.form - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("conjugated rotations recover the conjugating form") {
  germlab::SplitMix64 rng(4242);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXcd h = conditioned_matrix(rng, 2, 10.0);
    // Non-commuting unitaries generate irreducibly, so the invariant form is
    // unique up to scale (plane rotations alone would leave a two-parameter
    // family and no canonical representative).
    std::vector<Eigen::MatrixXcd> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(h * random_unitary(rng, 2) * h.inverse());
    auto res = germlab::find_invariant_form(gens, 20000, 1e-8);
    REQUIRE(res.success);
    REQUIRE(res.residual <= 1e-8);

    // P is proportional to (H^-1)* H^-1.
    Eigen::MatrixXcd target = (h.inverse()).adjoint() * h.inverse();
    target *= 2.0 / target.trace().real();
    REQUIRE((res.form - target).norm() < 1e-6 * target.norm());

    // H_P-conjugated generators are unitary to high accuracy.
    REQUIRE(germlab::conjugated_unitarity_defect(gens, res.form) < 1e-8);
  }
}

TEST_CASE("a single shear admits no bounded invariant form") {
  Eigen::MatrixXcd shear(2, 2);
  shear << 1, 1, 0, 1;
  auto res = germlab::find_invariant_form({shear}, 10000, 1e-8);
  REQUIRE_FALSE(res.success);
  REQUIRE(res.residual > 1e-8);
  REQUIRE_FALSE(res.residual_trajectory.empty());
}

TEST_CASE("non-invertible generator is rejected") {
  Eigen::MatrixXcd singular(2, 2);
  singular << 1, 0, 0, 0;
  REQUIRE_THROWS_AS(germlab::find_invariant_form({singular}), std::invalid_argument);
}

TEST_CASE("success bounds the P-operator norm of long random products") {
  germlab::SplitMix64 rng(99);
  Eigen::MatrixXcd h = conditioned_matrix(rng, 2, 5.0);
  std::vector<Eigen::MatrixXcd> gens;
  for (double angle : {0.5, 1.7}) gens.push_back(h * rotation2(angle) * h.inverse());
  const double tol = 1e-8;
  auto res = germlab::find_invariant_form(gens, 20000, tol);
  REQUIRE(res.success);

  const Eigen::MatrixXcd hp = germlab::form_square_root(res.form);
  const Eigen::MatrixXcd hp_inv = hp.inverse();
  double worst_low = 1.0, worst_high = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(2, 2);
    for (int k = 0; k < 20; ++k) {
      prod = gens[rng.next_u64() % gens.size()] * prod;
    }
    const double pnorm = (hp * prod * hp_inv).jacobiSvd().singularValues()(0);
    worst_low = std::min(worst_low, pnorm);
    worst_high = std::max(worst_high, pnorm);
  }
  REQUIRE(worst_low >= 1.0 - 10.0 * tol);
  REQUIRE(worst_high <= 1.0 + 10.0 * tol);
}
