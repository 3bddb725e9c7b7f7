// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/kkt.hpp"

#include <Eigen/Dense>

#include "stosqp/errors.hpp"

namespace stosqp {

void HessianAverager::add(const Eigen::MatrixXd& sampled_hessian) {
  if (sampled_hessian.rows() != sum_.rows() || sampled_hessian.cols() != sum_.cols()) {
    throw ConfigError("HessianAverager: sample dimension mismatch");
  }
  sum_ += sampled_hessian;
  ++count_;
}

Eigen::MatrixXd HessianAverager::average() const {
  if (count_ == 0) {
    throw ConfigError("HessianAverager: average requested before any sample");
  }
  return sum_ / static_cast<double>(count_);
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& G) {
  const Eigen::Index m = G.rows();
  const Eigen::Index d = G.cols();
  if (m >= d) {
    throw ConfigError("nullspace_basis: need m < d");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const double sigma_max = svd.singularValues()(0);
  const double sigma_min = svd.singularValues()(m - 1);
  if (!(sigma_min > 1e-10 * sigma_max)) {
    throw ConstraintQualificationError(
        "constraint Jacobian is rank deficient (sigma_min/sigma_max = " +
        std::to_string(sigma_min / (sigma_max > 0 ? sigma_max : 1.0)) + ")");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G.transpose());
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(d - m);
}

Regularized regularize(const Eigen::MatrixXd& avg, const Eigen::MatrixXd& G,
                       long t, double pd_floor) {
  const Eigen::Index d = G.cols();
  if (t == 0) {
    return {Eigen::MatrixXd::Identity(d, d), 0.0};
  }
  const Eigen::MatrixXd z = nullspace_basis(G);
  const Eigen::MatrixXd reduced = z.transpose() * avg * z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  if (lmin < pd_floor) {
    const double shift = -lmin + pd_floor;
    return {avg + shift * Eigen::MatrixXd::Identity(d, d), shift};
  }
  return {avg, 0.0};
}

KktSystem assemble_kkt(const Eigen::MatrixXd& B, const Eigen::MatrixXd& G) {
  const Eigen::Index d = B.rows();
  const Eigen::Index m = G.rows();
  if (B.cols() != d || G.cols() != d) {
    throw ConfigError("assemble_kkt: dimension mismatch");
  }
  KktSystem sys;
  sys.B = B;
  sys.G = G;
  sys.K = Eigen::MatrixXd::Zero(d + m, d + m);
  sys.K.topLeftCorner(d, d) = B;
  sys.K.topRightCorner(d, m) = G.transpose();
  sys.K.bottomLeftCorner(m, d) = G;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  sys.sigma_max_G = svd.singularValues()(0);
  sys.sigma_min_G = svd.singularValues()(m - 1);
  return sys;
}

}  // namespace stosqp
