// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stosqp/rng.hpp"

namespace stosqp {

struct KnownSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
};

// Equality-constrained problem  min f(x)  s.t.  c(x) = 0  with analytic
// derivatives. Immutable after construction; shareable across runs.
struct ProblemSpec {
  std::string name;
  int dim_primal = 0;  // d
  int dim_dual = 0;    // m, m < d

  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> constraints;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> constraint_jacobian;
  // Hessian of the i-th constraint, i in [0, m).
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, int)> constraint_hessian;

  Eigen::VectorXd x0;
  Eigen::VectorXd lambda0;
  std::optional<KnownSolution> known_solution;

  // hessian(x) + sum_i lambda_i * constraint_hessian(x, i), exact.
  Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& lambda) const;
};

// Gradient estimates are N(grad f, sigma2 (I + 11^T)); Hessian estimates put
// N(0, sigma2) noise on each unordered entry pair, keeping symmetry exact.
struct NoiseModel {
  double sigma2 = 0.0;
};

// ||(grad f + G^T lambda, c)||_2 with exact derivatives.
double eval_kkt_residual(const ProblemSpec& problem, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& lambda);

Eigen::VectorXd sample_gradient(const ProblemSpec& problem, const Eigen::VectorXd& x,
                                const NoiseModel& noise, RngStream& rng);

Eigen::MatrixXd sample_lagrangian_hessian(const ProblemSpec& problem,
                                          const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& lambda,
                                          const NoiseModel& noise, RngStream& rng);

// Catalog: eq_quadratic, eq_logistic, hs7, hs48, byrdsphr-like.
ProblemSpec builtin_problem(const std::string& name);
const std::vector<std::string>& builtin_problem_names();

}  // namespace stosqp
