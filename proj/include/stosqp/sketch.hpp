// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "stosqp/rng.hpp"

namespace stosqp {

enum class SketchKind { kCoordinate, kBlockCoordinate, kGaussian, kExact };

// Distribution over sketching matrices S in R^{n x q}. Coordinate sketches
// draw a single canonical basis vector uniformly (randomized Kaczmarz);
// block sketches draw q distinct coordinates; gaussian sketches have iid
// N(0,1) entries. kExact stands in for a direct solve.
struct SketchDistribution {
  SketchKind kind = SketchKind::kCoordinate;
  int block_size = 1;  // q, used by block/gaussian kinds

  Eigen::MatrixXd sample(int n, RngStream& rng) const;

  // "kaczmarz" | "block:q" | "gaussian:q" | "exact"
  static SketchDistribution parse(const std::string& text);
  std::string describe() const;
};

struct SolveReport {
  Eigen::VectorXd z;
  long iterations_used = 0;
  bool sketched_residual_ok = true;
  std::optional<Eigen::VectorXd> exact_solution;  // populated in audit mode
};

// One sketch-and-project update for K z = rhs:
//   z' = z - K S (S^T K^2 S)^+ S^T (K z - rhs).
// The pseudoinverse truncates singular values below 1e-12 of the largest.
Eigen::VectorXd sketch_project_step(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs,
                                    const Eigen::VectorXd& z, const Eigen::MatrixXd& S);

// tau sketch-and-project iterations from z = 0 with iid sketches;
// deterministic given the stream. kExact ignores tau and solves directly.
SolveReport solve_inexact(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs, long tau,
                          const SketchDistribution& dist, RngStream& rng,
                          bool audit = false);

// Direct dense solve with a residual certificate (relative residual 1e-10);
// throws SingularKktError otherwise.
Eigen::VectorXd solve_exact(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs);

struct ContractionAudit {
  double gamma_s = 0.0;         // lambda_min of E[K S (S^T K^2 S)^+ S^T K]
  double rho = 0.0;             // 1 - gamma_s
  Eigen::MatrixXd mean_projection;
  bool assumption_ok = true;    // gamma_s in (0, 1] up to MC tolerance
};

// Expected sketch projection: closed n-term sum for coordinate sketches,
// identity for exact, Monte-Carlo otherwise (rng required then).
ContractionAudit contraction_audit(const Eigen::MatrixXd& K, const SketchDistribution& dist,
                                   long mc_samples = 0, RngStream* rng = nullptr);

}  // namespace stosqp
