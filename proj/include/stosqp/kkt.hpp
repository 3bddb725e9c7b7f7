// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace stosqp {

// Running sum of sampled Lagrangian Hessians. The sample drawn at iteration
// t is appended only after the iteration-t system has been assembled, so the
// average used at iteration t depends on samples 0..t-1 alone.
class HessianAverager {
 public:
  explicit HessianAverager(int dim)
      : sum_(Eigen::MatrixXd::Zero(dim, dim)) {}

  void add(const Eigen::MatrixXd& sampled_hessian);
  Eigen::MatrixXd average() const;  // requires count() >= 1
  long count() const { return count_; }
  const Eigen::MatrixXd& running_sum() const { return sum_; }

 private:
  Eigen::MatrixXd sum_;
  long count_ = 0;
};

struct KktSystem {
  Eigen::MatrixXd B;  // regularized modified Hessian, d x d
  Eigen::MatrixXd G;  // constraint Jacobian, m x d
  Eigen::MatrixXd K;  // [[B, G^T], [G, 0]], symmetric
  double delta_magnitude = 0.0;
  double sigma_min_G = 0.0;
  double sigma_max_G = 0.0;
};

// Orthonormal basis Z of null(G) (G Z = 0, Z^T Z = I), from an orthogonal
// factorization of G^T. Throws ConstraintQualificationError when G is rank
// deficient (sigma_min < 1e-10 * sigma_max).
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& G);

struct Regularized {
  Eigen::MatrixXd B;
  double delta_magnitude = 0.0;
};

// Shifts `avg` by (pd_floor - lmin) I whenever the least eigenvalue lmin of
// Z^T avg Z falls below pd_floor, so the reduced Hessian stays uniformly
// positive definite. t = 0 returns the identity with no shift.
Regularized regularize(const Eigen::MatrixXd& avg, const Eigen::MatrixXd& G,
                       long t, double pd_floor);

KktSystem assemble_kkt(const Eigen::MatrixXd& B, const Eigen::MatrixXd& G);

}  // namespace stosqp
