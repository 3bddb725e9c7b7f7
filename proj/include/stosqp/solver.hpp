// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "stosqp/inference.hpp"
#include "stosqp/kkt.hpp"
#include "stosqp/problems.hpp"
#include "stosqp/sketch.hpp"
#include "stosqp/stepsize.hpp"

namespace stosqp {

struct MeritParams {
  double mu = 0.0;
  double nu = 0.0;
};

struct TraceRow {
  long t = 0;
  double kkt_residual = 0.0;
  std::optional<double> iter_error;  // requires a known solution
  std::optional<double> hess_error;  // ||K_t - K*||, requires a known solution
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> merit;
  double delta_magnitude = 0.0;
};

struct RunConfig {
  NoiseModel noise;
  Schedule sched;
  StepPolicy policy = StepPolicy::kUniformRandom;
  SketchDistribution dist;
  long tau = 50;
  double pd_floor = 0.1;
  long iterations = 10000;
  long stride = 100;
  uint64_t master_seed = 0;
  uint64_t run_index = 0;
  bool record_merit = false;
  MeritParams merit_params;
};

// One run's mutable state. Each of the three random inputs (derivative
// samples, sketches, stepsizes) has its own counter-based stream, drawn in
// that order within an iteration, mirroring the filtration of the scheme.
struct RunState {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  HessianAverager averager;
  long t = 0;
  RngStream xi_stream;
  RngStream zeta_stream;
  RngStream psi_stream;
  KktSystem last_kkt;
  CovarianceAccumulator gradient_moments;

  static RunState init(const ProblemSpec& problem, uint64_t master_seed,
                       uint64_t run_index);
};

struct StepInfo {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double delta_magnitude = 0.0;
};

// One iteration: sample derivatives, build the averaged-and-regularized KKT
// system from past samples, run the (in)exact solve, step with a sandwiched
// stepsize, then append the fresh Hessian sample to the averager.
StepInfo step(RunState& state, const ProblemSpec& problem, const RunConfig& config);

// Thrown when a run aborts; carries the iteration index and the partial trace.
struct RunError : std::runtime_error {
  RunError(const std::string& what, long iteration, std::vector<TraceRow> trace)
      : std::runtime_error(what), iteration(iteration), partial_trace(std::move(trace)) {}
  long iteration = 0;
  std::vector<TraceRow> partial_trace;
};

struct RunResult {
  std::vector<TraceRow> trace;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  long iterations = 0;
  double final_kkt_residual = 0.0;
  CovarianceAccumulator gradient_moments{1};
  KktSystem final_kkt;  // K_T, from samples 0..T-1 at the final iterate
};

RunResult run(const ProblemSpec& problem, const RunConfig& config);

// Assembles the KKT system the next step would use at the current state.
KktSystem current_kkt(const RunState& state, const ProblemSpec& problem, double pd_floor);

// KKT matrix from exact derivatives at a given point (no regularization).
Eigen::MatrixXd exact_kkt_matrix(const ProblemSpec& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& lambda);

// Augmented Lagrangian merit L + (mu/2)||c||^2 + (nu/2)||grad_x L||^2.
double merit_value(const ProblemSpec& problem, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& lambda, const MeritParams& params);

Eigen::VectorXd merit_gradient(const ProblemSpec& problem, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& lambda, const MeritParams& params);

struct OracleResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  long iterations = 0;
  double kkt_residual = 0.0;
};

// Full-step exact-Newton SQP with the same reduced-Hessian regularization;
// certifies reference solutions to ||(grad_x L, c)|| <= tol.
OracleResult deterministic_sqp_oracle(const ProblemSpec& problem,
                                      const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& lambda0,
                                      long max_iter = 200, double tol = 1e-10,
                                      double pd_floor = 0.1);

}  // namespace stosqp
