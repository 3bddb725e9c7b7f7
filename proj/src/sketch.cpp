// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "stosqp/errors.hpp"

namespace stosqp {

Eigen::MatrixXd SketchDistribution::sample(int n, RngStream& rng) const {
  switch (kind) {
    case SketchKind::kCoordinate: {
      const int i = std::min<int>(static_cast<int>(rng.next_uniform() * n), n - 1);
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, 1);
      s(i, 0) = 1.0;
      return s;
    }
    case SketchKind::kBlockCoordinate: {
      const int q = std::min(block_size, n);
      // Partial Fisher-Yates draw of q distinct coordinates.
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) idx[i] = i;
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, q);
      for (int j = 0; j < q; ++j) {
        const int pick =
            j + std::min<int>(static_cast<int>(rng.next_uniform() * (n - j)), n - j - 1);
        std::swap(idx[j], idx[pick]);
        s(idx[j], j) = 1.0;
      }
      return s;
    }
    case SketchKind::kGaussian: {
      const int q = std::min(block_size, n);
      Eigen::MatrixXd s(n, q);
      for (int j = 0; j < q; ++j) {
        for (int i = 0; i < n; ++i) {
          s(i, j) = rng.next_normal();
        }
      }
      return s;
    }
    case SketchKind::kExact:
      return Eigen::MatrixXd::Identity(n, n);
  }
  throw ConfigError("unreachable sketch kind");
}

SketchDistribution SketchDistribution::parse(const std::string& text) {
  SketchDistribution dist;
  if (text == "kaczmarz" || text == "coordinate") {
    dist.kind = SketchKind::kCoordinate;
    dist.block_size = 1;
    return dist;
  }
  if (text == "exact") {
    dist.kind = SketchKind::kExact;
    return dist;
  }
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const int q = std::stoi(text.substr(colon + 1));
    if (q < 1) throw ConfigError("sketch block size must be >= 1");
    if (head == "block") {
      dist.kind = SketchKind::kBlockCoordinate;
      dist.block_size = q;
      return dist;
    }
    if (head == "gaussian") {
      dist.kind = SketchKind::kGaussian;
      dist.block_size = q;
      return dist;
    }
  }
  throw ConfigError("unknown sketch '" + text +
                    "'; expected kaczmarz, block:q, gaussian:q, or exact");
}

std::string SketchDistribution::describe() const {
  switch (kind) {
    case SketchKind::kCoordinate: return "kaczmarz";
    case SketchKind::kBlockCoordinate: return "block:" + std::to_string(block_size);
    case SketchKind::kGaussian: return "gaussian:" + std::to_string(block_size);
    case SketchKind::kExact: return "exact";
  }
  return "kaczmarz";
}

Eigen::VectorXd sketch_project_step(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs,
                                    const Eigen::VectorXd& z, const Eigen::MatrixXd& S) {
  const Eigen::VectorXd residual = K * z - rhs;
  if (S.cols() == 1) {
    // Scalar pseudoinverse; covers the Kaczmarz path without a factorization.
    const Eigen::VectorXd ks = K * S.col(0);
    const double denom = ks.squaredNorm();
    if (denom <= 0.0) return z;
    return z - ks * (S.col(0).dot(residual) / denom);
  }
  const Eigen::MatrixXd ks = K * S;
  const Eigen::MatrixXd gram = ks.transpose() * ks;  // S^T K^2 S
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sing = svd.singularValues();
  const double cutoff = 1e-12 * sing(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sing.size());
  for (int i = 0; i < sing.size(); ++i) {
    if (sing(i) > cutoff) inv(i) = 1.0 / sing(i);
  }
  const Eigen::VectorXd w =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() *
      (S.transpose() * residual);
  return z - ks * w;
}

SolveReport solve_inexact(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs, long tau,
                          const SketchDistribution& dist, RngStream& rng, bool audit) {
  const int n = static_cast<int>(K.rows());
  SolveReport report;
  if (dist.kind == SketchKind::kExact) {
    report.z = solve_exact(K, rhs);
    report.iterations_used = 0;
    if (audit) report.exact_solution = report.z;
    return report;
  }
  if (tau < 1) throw ConfigError("solve_inexact: tau must be >= 1");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd s;
  for (long j = 0; j < tau; ++j) {
    s = dist.sample(n, rng);
    z = sketch_project_step(K, rhs, z, s);
  }
  report.z = z;
  report.iterations_used = tau;
  const double scale = std::max(1.0, rhs.norm());
  report.sketched_residual_ok = (s.transpose() * (K * z - rhs)).norm() <= 1e-10 * scale;
  if (audit) report.exact_solution = solve_exact(K, rhs);
  return report;
}

Eigen::VectorXd solve_exact(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd z = lu.solve(rhs);
  const double scale = std::max(rhs.norm(), K.norm() * z.norm());
  double residual = (K * z - rhs).norm();
  if (!std::isfinite(residual) || residual > 1e-12 * std::max(1.0, scale)) {
    // One refinement step before giving up.
    z += lu.solve(rhs - K * z);
    residual = (K * z - rhs).norm();
  }
  if (!std::isfinite(residual) || residual > 1e-10 * std::max(1.0, scale)) {
    throw SingularKktError("direct KKT solve failed; matrix is singular or near singular");
  }
  return z;
}

ContractionAudit contraction_audit(const Eigen::MatrixXd& K, const SketchDistribution& dist,
                                   long mc_samples, RngStream* rng) {
  const int n = static_cast<int>(K.rows());
  ContractionAudit audit;
  switch (dist.kind) {
    case SketchKind::kExact:
      audit.mean_projection = Eigen::MatrixXd::Identity(n, n);
      break;
    case SketchKind::kCoordinate: {
      // E[P] = (1/n) sum_i (K e_i)(K e_i)^T / (K^2)_{ii}, exact.
      Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd col = K.col(i);
        const double denom = col.squaredNorm();
        if (denom > 0.0) mean += col * col.transpose() / denom;
      }
      audit.mean_projection = mean / static_cast<double>(n);
      break;
    }
    default: {
      if (rng == nullptr || mc_samples < 1) {
        throw ConfigError("contraction_audit: Monte-Carlo sketch kinds need mc_samples and an rng");
      }
      Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
      for (long s = 0; s < mc_samples; ++s) {
        const Eigen::MatrixXd sk = dist.sample(n, *rng);
        const Eigen::MatrixXd ks = K * sk;
        const Eigen::MatrixXd gram = ks.transpose() * ks;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& sing = svd.singularValues();
        const double cutoff = 1e-12 * sing(0);
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(sing.size());
        for (int i = 0; i < sing.size(); ++i) {
          if (sing(i) > cutoff) inv(i) = 1.0 / sing(i);
        }
        mean += ks * svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() *
                ks.transpose();
      }
      audit.mean_projection = mean / static_cast<double>(mc_samples);
      break;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (audit.mean_projection + audit.mean_projection.transpose()),
      Eigen::EigenvaluesOnly);
  audit.gamma_s = eig.eigenvalues()(0);
  audit.rho = 1.0 - audit.gamma_s;
  audit.assumption_ok = audit.gamma_s > 1e-8 && audit.gamma_s <= 1.0 + 1e-8;
  return audit;
}

}  // namespace stosqp
