// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Core>

#include "stosqp/problems.hpp"
#include "stosqp/sketch.hpp"
#include "stosqp/stepsize.hpp"

namespace stosqp {

// Streaming first and second moments of the sampled gradients g_bar_i,
// i = 0..t-1. Covariance uses the 1/t normalization.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(int dim)
      : sum_(Eigen::VectorXd::Zero(dim)),
        sum_outer_(Eigen::MatrixXd::Zero(dim, dim)) {}

  void update(const Eigen::VectorXd& g_bar);
  void merge(const CovarianceAccumulator& other);
  long count() const { return count_; }
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd sample_covariance() const;

 private:
  Eigen::VectorXd sum_;
  Eigen::MatrixXd sum_outer_;
  long count_ = 0;
};

// Plug-in covariance estimate
//   Omega_t = K^-1 blockdiag(sampleCov(g_bar), 0) K^-1,
//   Xi_t = Omega_t / (2 + r),  r = beta_lim/beta_tilde of the schedule.
// Independent of the sketching distribution used by the solver.
Eigen::MatrixXd covariance_estimate(const CovarianceAccumulator& acc,
                                    const Eigen::MatrixXd& K, const Schedule& sched);

// Limit covariance built from the problem structure at the known solution:
// exact-solve mode returns Omega*/(2+r); sketch modes apply the spectral
// Hadamard correction with a Monte-Carlo estimate over sketch products.
Eigen::MatrixXd exact_covariance_oracle(const ProblemSpec& problem, const NoiseModel& noise,
                                        const Schedule& sched, const SketchDistribution& dist,
                                        long tau, long mc_samples, RngStream* rng = nullptr);

struct ConfidenceQuery {
  Eigen::VectorXd direction;  // w, length d+m
  double level = 0.95;
};

struct Interval {
  double center = 0.0;
  double half_width = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// w^T(x, lambda) +- z_level sqrt(c1 w^T Xi w) / t^(c2/2).
Interval confidence_interval(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                             const Eigen::MatrixXd& xi, const ConfidenceQuery& query,
                             long t, const Schedule& sched);

struct NormalityReport {
  double ks_statistic = 0.0;  // of (s - mean)/sd against N(0,1)
  double ks_raw = 0.0;        // of the samples as given against N(0,1)
  double mean = 0.0;
  double variance = 0.0;
  long n = 0;
};

// Requires at least 50 samples.
NormalityReport normality_diagnostics(const std::vector<double>& samples);

double normal_cdf(double x);
double normal_quantile(double p);  // inverse of normal_cdf on (0,1)

}  // namespace stosqp
