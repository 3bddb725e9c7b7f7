// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>
#include <Eigen/Dense>

#include "stosqp/errors.hpp"
#include "stosqp/problems.hpp"

using namespace stosqp;

namespace {

constexpr double kFdStep = 1e-5;

Eigen::VectorXd fd_gradient(const ProblemSpec& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi(i) += kFdStep;
    lo(i) -= kFdStep;
    g(i) = (p.objective(hi) - p.objective(lo)) / (2.0 * kFdStep);
  }
  return g;
}

Eigen::MatrixXd fd_jacobian(const ProblemSpec& p, const Eigen::VectorXd& x) {
  Eigen::MatrixXd j(p.dim_dual, x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi(i) += kFdStep;
    lo(i) -= kFdStep;
    j.col(i) = (p.constraints(hi) - p.constraints(lo)) / (2.0 * kFdStep);
  }
  return j;
}

Eigen::MatrixXd fd_hessian(const ProblemSpec& p, const Eigen::VectorXd& x) {
  Eigen::MatrixXd h(x.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi(i) += kFdStep;
    lo(i) -= kFdStep;
    h.col(i) = (p.gradient(hi) - p.gradient(lo)) / (2.0 * kFdStep);
  }
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd fd_constraint_hessian(const ProblemSpec& p, const Eigen::VectorXd& x,
                                      int which) {
  Eigen::MatrixXd h(x.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi(i) += kFdStep;
    lo(i) -= kFdStep;
    h.col(i) = (p.constraint_jacobian(hi).row(which) -
                p.constraint_jacobian(lo).row(which)).transpose() /
               (2.0 * kFdStep);
  }
  return 0.5 * (h + h.transpose());
}

bool close_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  return (a - b).norm() <= tol * std::max(1.0, std::max(a.norm(), b.norm()));
}

}  // namespace

TEST_CASE("catalog derivatives match finite differences at random points") {
  RngStream rng(2024, 0);
  for (const auto& name : builtin_problem_names()) {
    CAPTURE(name);
    const ProblemSpec p = builtin_problem(name);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x = p.x0;
      for (int i = 0; i < x.size(); ++i) x(i) += 0.5 * rng.next_normal();
      CAPTURE(trial);
      CHECK(close_rel(p.gradient(x), fd_gradient(p, x), 1e-5));
      CHECK(close_rel(p.constraint_jacobian(x), fd_jacobian(p, x), 1e-5));
      CHECK(close_rel(p.hessian(x), fd_hessian(p, x), 1e-4));
      for (int c = 0; c < p.dim_dual; ++c) {
        CHECK(close_rel(p.constraint_hessian(x, c), fd_constraint_hessian(p, x, c), 1e-4));
      }
    }
  }
}

TEST_CASE("known solutions are stationary") {
  for (const auto& name : builtin_problem_names()) {
    CAPTURE(name);
    const ProblemSpec p = builtin_problem(name);
    REQUIRE(p.known_solution.has_value());
    const auto& sol = *p.known_solution;
    const Eigen::VectorXd grad_lag =
        p.gradient(sol.x) + p.constraint_jacobian(sol.x).transpose() * sol.lambda;
    CHECK(grad_lag.norm() <= 1e-8);
    CHECK(p.constraints(sol.x).norm() <= 1e-8);
  }
}

TEST_CASE("kkt residual examples") {
  const ProblemSpec p = builtin_problem("eq_quadratic");
  Eigen::VectorXd x(2), lambda(1);
  x << 1.0, 1.0;
  lambda << -1.0;
  CHECK(eval_kkt_residual(p, x, lambda) == doctest::Approx(0.0).epsilon(1).scale(1e-14));
  x << 0.0, 0.0;
  lambda << 0.0;
  CHECK(eval_kkt_residual(p, x, lambda) == doctest::Approx(2.0));

  const ProblemSpec hs7 = builtin_problem("hs7");
  CHECK(eval_kkt_residual(hs7, hs7.known_solution->x, hs7.known_solution->lambda) <= 1e-8);
  CHECK(hs7.known_solution->x(0) == 0.0);
  CHECK(hs7.known_solution->x(1) == doctest::Approx(std::sqrt(3.0)));
  CHECK(hs7.objective(hs7.known_solution->x) == doctest::Approx(-std::sqrt(3.0)));
}

TEST_CASE("kkt residual rejects dimension mismatch") {
  const ProblemSpec p = builtin_problem("eq_quadratic");
  CHECK_THROWS_AS(eval_kkt_residual(p, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1)),
                  ConfigError);
}

TEST_CASE("zero-noise samples are exact") {
  const ProblemSpec p = builtin_problem("hs7");
  RngStream rng(5, 0);
  Eigen::VectorXd x(2), lambda(1);
  x << 0.3, -1.2;
  lambda << 0.7;
  const NoiseModel off{0.0};
  CHECK((sample_gradient(p, x, off, rng) - p.gradient(x)).norm() == 0.0);
  CHECK((sample_lagrangian_hessian(p, x, lambda, off, rng) -
         p.lagrangian_hessian(x, lambda)).norm() == 0.0);
}

TEST_CASE("gradient sampling is bit-reproducible and accepts the sigma grid") {
  const ProblemSpec p = builtin_problem("eq_quadratic");
  const Eigen::VectorXd x = p.x0;
  for (double sigma2 : {1e-8, 1e-4, 1e-2, 1e-1, 1.0}) {
    RngStream a(11, 3);
    RngStream b(11, 3);
    const NoiseModel noise{sigma2};
    const Eigen::VectorXd ga = sample_gradient(p, x, noise, a);
    const Eigen::VectorXd gb = sample_gradient(p, x, noise, b);
    CHECK((ga - gb).norm() == 0.0);
  }
}

TEST_CASE("gradient noise mean and covariance") {
  const ProblemSpec p = builtin_problem("eq_quadratic");
  Eigen::VectorXd x(2);
  x << 0.4, -0.3;
  const Eigen::VectorXd g0 = p.gradient(x);
  const NoiseModel noise{1.0};
  RngStream rng(77, 0);
  const int n = 200000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sum_outer = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d g = sample_gradient(p, x, noise, rng) - g0;
    sum += g;
    sum_outer += g * g.transpose();
  }
  const Eigen::Vector2d mean = sum / n;
  const Eigen::Matrix2d cov = sum_outer / n - mean * mean.transpose();
  // Mean within 4 standard errors of zero; covariance sigma2 (I + 11^T)
  // entrywise within 5%.
  const double se = 4.0 * std::sqrt(2.0 / n);
  CHECK(std::abs(mean(0)) < se);
  CHECK(std::abs(mean(1)) < se);
  CHECK(cov(0, 0) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(cov(1, 1) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(cov(0, 1) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampled Hessian is exactly symmetric and unbiased") {
  const ProblemSpec p = builtin_problem("hs48");
  RngStream rng(13, 0);
  const NoiseModel noise{0.5};
  const Eigen::VectorXd x = p.x0;
  const Eigen::VectorXd lambda = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(5, 5);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd h = sample_lagrangian_hessian(p, x, lambda, noise, rng);
    CHECK((h - h.transpose()).norm() == 0.0);
    mean += h;
  }
  mean /= n;
  CHECK((mean - p.lagrangian_hessian(x, lambda)).norm() < 0.05);
}

TEST_CASE("affine constraints leave only objective noise in the Hessian sample") {
  const ProblemSpec p = builtin_problem("eq_quadratic");
  const NoiseModel noise{1e-2};
  Eigen::VectorXd x(2), l1(1), l2(1);
  x << 0.1, 0.2;
  l1 << 3.0;
  l2 << -5.0;
  RngStream a(21, 0), b(21, 0);
  // Constraint curvature vanishes, so the multiplier cannot enter.
  CHECK((sample_lagrangian_hessian(p, x, l1, noise, a) -
         sample_lagrangian_hessian(p, x, l2, noise, b)).norm() == 0.0);
}

TEST_CASE("constraint curvature shows up at nonzero multipliers") {
  const ProblemSpec p = builtin_problem("hs7");
  const Eigen::VectorXd x = p.known_solution->x;
  Eigen::VectorXd lambda(1);
  lambda << 2.0;
  RngStream rng(3, 0);
  const Eigen::MatrixXd h = sample_lagrangian_hessian(p, x, lambda, NoiseModel{0.0}, rng);
  const Eigen::MatrixXd expected =
      p.hessian(x) + lambda(0) * p.constraint_hessian(x, 0);
  CHECK((h - expected).norm() == 0.0);
  // The curvature itself agrees with finite differences of the Jacobian.
  CHECK(close_rel(p.constraint_hessian(x, 0), fd_constraint_hessian(p, x, 0), 1e-4));
}

TEST_CASE("unknown problem names list the alternatives") {
  try {
    builtin_problem("nope");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("eq_quadratic") != std::string::npos);
    CHECK(msg.find("hs48") != std::string::npos);
  }
}

TEST_CASE("eq_quadratic solution solves the KKT system") {
  const ProblemSpec p = builtin_problem("eq_quadratic");
  const auto& sol = *p.known_solution;
  CHECK(sol.x(0) == doctest::Approx(1.0));
  CHECK(sol.x(1) == doctest::Approx(1.0));
  CHECK(sol.lambda(0) == doctest::Approx(-1.0));
}

TEST_CASE("hs48 solution is the known affine-constrained optimum") {
  const ProblemSpec p = builtin_problem("hs48");
  const auto& sol = *p.known_solution;
  for (int i = 0; i < 5; ++i) CHECK(sol.x(i) == doctest::Approx(1.0));
  CHECK(p.objective(sol.x) == doctest::Approx(0.0).epsilon(1).scale(1e-12));
}
