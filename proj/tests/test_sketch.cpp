// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>
#include <Eigen/Dense>

#include "stosqp/errors.hpp"
#include "stosqp/rng.hpp"
#include "stosqp/sketch.hpp"

using namespace stosqp;

namespace {

Eigen::MatrixXd arrow3() {
  Eigen::MatrixXd k(3, 3);
  k << 1, 0, 1,
       0, 1, 1,
       1, 1, 0;
  return k;
}

Eigen::MatrixXd random_symmetric_invertible(int n, RngStream& rng) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.next_normal();
  Eigen::MatrixXd k = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
  // Push the spectrum away from zero while staying indefinite when possible.
  for (int i = 0; i < n; ++i) {
    if (std::abs(eig.eigenvalues()(i)) < 0.3) {
      k += 0.5 * Eigen::MatrixXd::Identity(n, n);
      break;
    }
  }
  return k;
}

}  // namespace

TEST_CASE("hand-applied coordinate step") {
  Eigen::MatrixXd k = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  Eigen::VectorXd rhs(2);
  rhs << -4.0, -1.0;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 1);
  s(0, 0) = 1.0;
  const Eigen::VectorXd z =
      sketch_project_step(k, rhs, Eigen::VectorXd::Zero(2), s);
  CHECK(z(0) == doctest::Approx(-2.0));
  CHECK(z(1) == 0.0);
}

TEST_CASE("full sketch recovers the exact solution in one step") {
  RngStream rng(8, 0);
  const Eigen::MatrixXd k = random_symmetric_invertible(4, rng);
  Eigen::VectorXd rhs(4);
  for (int i = 0; i < 4; ++i) rhs(i) = rng.next_normal();
  const Eigen::VectorXd z = sketch_project_step(
      k, rhs, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4));
  CHECK((k * z - rhs).norm() <= 1e-10);
}

TEST_CASE("exact solutions are fixed points") {
  RngStream rng(9, 0);
  const Eigen::MatrixXd k = random_symmetric_invertible(4, rng);
  Eigen::VectorXd rhs(4);
  for (int i = 0; i < 4; ++i) rhs(i) = rng.next_normal();
  const Eigen::VectorXd z_star = solve_exact(k, rhs);
  SketchDistribution dist;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd s = dist.sample(4, rng);
    CHECK((sketch_project_step(k, rhs, z_star, s) - z_star).norm() <= 1e-10);
  }
}

TEST_CASE("sketched residual annihilation and projection idempotence") {
  RngStream rng(10, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_uniform() * 5);
    const Eigen::MatrixXd k = random_symmetric_invertible(n, rng);
    Eigen::VectorXd rhs(n), z0(n);
    for (int i = 0; i < n; ++i) {
      rhs(i) = rng.next_normal();
      z0(i) = rng.next_normal();
    }
    SketchDistribution dist;
    const int pick = trial % 3;
    if (pick == 0) {
      dist.kind = SketchKind::kCoordinate;
    } else if (pick == 1) {
      dist.kind = SketchKind::kBlockCoordinate;
      dist.block_size = std::min(2, n);
    } else {
      dist.kind = SketchKind::kGaussian;
      dist.block_size = std::min(2, n);
    }
    const Eigen::MatrixXd s = dist.sample(n, rng);
    const Eigen::VectorXd z1 = sketch_project_step(k, rhs, z0, s);
    CHECK((s.transpose() * (k * z1 - rhs)).norm() <= 1e-10);

    // P = K S (S^T K^2 S)^+ S^T K is an orthogonal projection.
    const Eigen::MatrixXd ks = k * s;
    const Eigen::MatrixXd p =
        ks * (ks.transpose() * ks).completeOrthogonalDecomposition().pseudoInverse() *
        ks.transpose();
    CHECK((p * p - p).norm() <= 1e-10);
  }
}

TEST_CASE("solve_exact examples") {
  CHECK((solve_exact(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3)) -
         Eigen::Vector3d(1, 2, 3)).norm() == 0.0);

  Eigen::VectorXd rhs(3);
  rhs << 0.0, 0.0, 2.0;
  const Eigen::VectorXd z = solve_exact(arrow3(), rhs);
  CHECK(z(0) == doctest::Approx(1.0));
  CHECK(z(1) == doctest::Approx(1.0));
  CHECK(z(2) == doctest::Approx(-1.0));

  RngStream rng(12, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd k = random_symmetric_invertible(5, rng);
    Eigen::VectorXd b(5);
    for (int i = 0; i < 5; ++i) b(i) = rng.next_normal();
    const Eigen::VectorXd x = solve_exact(k, b);
    CHECK((k * x - b).norm() <= 1e-10 * std::max(1.0, b.norm()));
  }
}

TEST_CASE("solve_exact rejects singular systems") {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2, 2);
  k(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_exact(k, Eigen::Vector2d(1.0, 1.0)), SingularKktError);
}

TEST_CASE("audit mode reports the exact solution alongside the iterate") {
  RngStream rng(44, 0);
  const Eigen::MatrixXd k = arrow3();
  Eigen::VectorXd rhs(3);
  rhs << 1.0, 0.0, -1.0;
  SketchDistribution dist;
  const SolveReport rep = solve_inexact(k, rhs, 5, dist, rng, /*audit=*/true);
  REQUIRE(rep.exact_solution.has_value());
  CHECK((k * *rep.exact_solution - rhs).norm() <= 1e-10);
  const SolveReport quiet = solve_inexact(k, rhs, 5, dist, rng);
  CHECK_FALSE(quiet.exact_solution.has_value());
}

TEST_CASE("exact mode ignores tau") {
  RngStream rng(14, 0);
  const Eigen::MatrixXd k = arrow3();
  Eigen::VectorXd rhs(3);
  rhs << 0.5, -1.0, 2.0;
  SketchDistribution dist;
  dist.kind = SketchKind::kExact;
  const SolveReport rep = solve_inexact(k, rhs, 1, dist, rng);
  CHECK((k * rep.z - rhs).norm() <= 1e-10);
  CHECK(rep.iterations_used == 0);
}

TEST_CASE("kaczmarz approaches the exact solution") {
  RngStream rng(15, 0);
  const Eigen::MatrixXd k = arrow3();
  Eigen::VectorXd rhs(3);
  rhs << 0.0, 0.0, 2.0;
  const Eigen::VectorXd z_star = solve_exact(k, rhs);
  SketchDistribution dist;
  double err = 0.0;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    const SolveReport rep = solve_inexact(k, rhs, 200, dist, rng);
    err += (rep.z - z_star).norm();
  }
  CHECK(err / trials <= 1e-6);
}

TEST_CASE("contraction audit closed forms") {
  SketchDistribution coord;
  const ContractionAudit id3 = contraction_audit(Eigen::MatrixXd::Identity(3, 3), coord);
  CHECK((id3.mean_projection - Eigen::MatrixXd::Identity(3, 3) / 3.0).norm() <= 1e-14);
  CHECK(id3.gamma_s == doctest::Approx(1.0 / 3.0));
  CHECK(id3.rho == doctest::Approx(2.0 / 3.0));

  SketchDistribution exact;
  exact.kind = SketchKind::kExact;
  const ContractionAudit full = contraction_audit(arrow3(), exact);
  CHECK(full.gamma_s == doctest::Approx(1.0));
  CHECK(full.rho == doctest::Approx(0.0));

  // Exact three-term sum for the arrow matrix.
  const Eigen::MatrixXd k = arrow3();
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd col = k.col(i);
    expected += col * col.transpose() / col.squaredNorm();
  }
  expected /= 3.0;
  const ContractionAudit arrow = contraction_audit(k, coord);
  CHECK((arrow.mean_projection - expected).norm() <= 1e-14);
  CHECK(arrow.gamma_s > 0.0);
  CHECK(arrow.gamma_s <= 1.0);
  CHECK(arrow.assumption_ok);
}

TEST_CASE("audit's monte-carlo path agrees with the closed form") {
  RngStream rng(16, 0);
  const Eigen::MatrixXd k = arrow3();
  SketchDistribution coord;
  const ContractionAudit exact = contraction_audit(k, coord);
  SketchDistribution gauss;
  gauss.kind = SketchKind::kGaussian;
  gauss.block_size = 3;
  // A full-dimension gaussian sketch projects onto everything: gamma = 1.
  const ContractionAudit mc = contraction_audit(k, gauss, 200, &rng);
  CHECK(mc.gamma_s == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(exact.gamma_s < mc.gamma_s);
}

TEST_CASE("expected error is monotone in tau") {
  RngStream audit_rng(18, 0);
  const Eigen::MatrixXd k = arrow3();
  Eigen::VectorXd rhs(3);
  rhs << 1.0, -2.0, 0.5;
  const Eigen::VectorXd z_star = solve_exact(k, rhs);
  SketchDistribution dist;
  double prev = std::numeric_limits<double>::infinity();
  RngStream rng(19, 0);
  for (long tau : {1L, 3L, 8L, 20L, 50L}) {
    double mean_sq = 0.0;
    const int trials = 4000;
    for (int i = 0; i < trials; ++i) {
      const SolveReport rep = solve_inexact(k, rhs, tau, dist, rng);
      mean_sq += (rep.z - z_star).squaredNorm();
    }
    mean_sq /= trials;
    CHECK(mean_sq <= prev * 1.05);
    prev = mean_sq;
  }
  (void)audit_rng;
}

TEST_CASE("sketch distribution parsing round-trips") {
  CHECK(SketchDistribution::parse("kaczmarz").kind == SketchKind::kCoordinate);
  CHECK(SketchDistribution::parse("exact").kind == SketchKind::kExact);
  const SketchDistribution block = SketchDistribution::parse("block:3");
  CHECK(block.kind == SketchKind::kBlockCoordinate);
  CHECK(block.block_size == 3);
  const SketchDistribution gauss = SketchDistribution::parse("gaussian:2");
  CHECK(gauss.kind == SketchKind::kGaussian);
  CHECK(gauss.block_size == 2);
  CHECK(SketchDistribution::parse(block.describe()).block_size == 3);
  CHECK_THROWS_AS(SketchDistribution::parse("fancy"), ConfigError);
}
