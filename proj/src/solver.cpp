// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/solver.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "stosqp/errors.hpp"

namespace stosqp {

namespace {

constexpr double kDivergenceNorm = 1e8;

// Stream ids for the three independent randomness sources of a run.
constexpr uint64_t kXiStream = 1;
constexpr uint64_t kZetaStream = 2;
constexpr uint64_t kPsiStream = 3;

double spectral_norm(const Eigen::MatrixXd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

}  // namespace

RunState RunState::init(const ProblemSpec& problem, uint64_t master_seed,
                        uint64_t run_index) {
  const uint64_t run_key = derive_seed(master_seed, run_index);
  RunState state{problem.x0,
                 problem.lambda0,
                 HessianAverager(problem.dim_primal),
                 0,
                 RngStream(run_key, kXiStream),
                 RngStream(run_key, kZetaStream),
                 RngStream(run_key, kPsiStream),
                 KktSystem{},
                 CovarianceAccumulator(problem.dim_primal)};
  return state;
}

KktSystem current_kkt(const RunState& state, const ProblemSpec& problem,
                      double pd_floor) {
  const Eigen::MatrixXd g = problem.constraint_jacobian(state.x);
  const Regularized reg =
      state.averager.count() == 0
          ? regularize(Eigen::MatrixXd(), g, 0, pd_floor)
          : regularize(state.averager.average(), g, state.t, pd_floor);
  KktSystem sys = assemble_kkt(reg.B, g);
  sys.delta_magnitude = reg.delta_magnitude;
  return sys;
}

Eigen::MatrixXd exact_kkt_matrix(const ProblemSpec& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& lambda) {
  const int d = problem.dim_primal;
  const int m = problem.dim_dual;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d + m, d + m);
  k.topLeftCorner(d, d) = problem.lagrangian_hessian(x, lambda);
  const Eigen::MatrixXd g = problem.constraint_jacobian(x);
  k.topRightCorner(d, m) = g.transpose();
  k.bottomLeftCorner(m, d) = g;
  return k;
}

StepInfo step(RunState& state, const ProblemSpec& problem, const RunConfig& config) {
  const int d = problem.dim_primal;
  const int m = problem.dim_dual;
  const Envelope env = envelope(config.sched, state.t);

  // Step 1: single-sample derivative estimates at the current iterate.
  const Eigen::VectorXd g_bar =
      sample_gradient(problem, state.x, config.noise, state.xi_stream);
  const Eigen::MatrixXd lag_hess_bar = sample_lagrangian_hessian(
      problem, state.x, state.lambda, config.noise, state.xi_stream);

  // Step 2: modified Hessian from samples 0..t-1 only, then the Newton system.
  state.last_kkt = current_kkt(state, problem, config.pd_floor);
  Eigen::VectorXd rhs(d + m);
  rhs.head(d) = -(g_bar + state.last_kkt.G.transpose() * state.lambda);
  rhs.tail(m) = -problem.constraints(state.x);
  const SolveReport report =
      solve_inexact(state.last_kkt.K, rhs, config.tau, config.dist, state.zeta_stream);

  // Step 3: sandwiched random stepsize.
  const double alpha =
      draw_stepsize(config.policy, env.beta, env.eta, state.psi_stream);
  if (!(alpha >= env.beta && alpha <= env.eta)) {
    throw ConfigError("stepsize left the sandwich interval");
  }
  state.x += alpha * report.z.head(d);
  state.lambda += alpha * report.z.tail(m);

  // The fresh Hessian sample only enters the average from the next iteration.
  state.gradient_moments.update(g_bar);
  state.averager.add(lag_hess_bar);
  ++state.t;

  const double iterate_norm =
      std::sqrt(state.x.squaredNorm() + state.lambda.squaredNorm());
  if (!std::isfinite(iterate_norm) || iterate_norm > kDivergenceNorm) {
    throw DivergenceError("iterate diverged (norm " + std::to_string(iterate_norm) + ")",
                          state.t - 1);
  }
  return {alpha, env.beta, env.eta, state.last_kkt.delta_magnitude};
}

RunResult run(const ProblemSpec& problem, const RunConfig& config) {
  if (config.iterations < 1) throw ConfigError("run: iterations must be >= 1");
  if (config.stride < 1) throw ConfigError("run: stride must be >= 1");
  RunState state = RunState::init(problem, config.master_seed, config.run_index);

  std::optional<Eigen::MatrixXd> kstar;
  Eigen::VectorXd sol_stacked;
  if (problem.known_solution.has_value()) {
    const auto& sol = *problem.known_solution;
    kstar = exact_kkt_matrix(problem, sol.x, sol.lambda);
    sol_stacked.resize(problem.dim_primal + problem.dim_dual);
    sol_stacked << sol.x, sol.lambda;
  }

  std::vector<TraceRow> trace;
  trace.reserve(static_cast<size_t>(config.iterations / config.stride) + 1);
  for (long t = 0; t < config.iterations; ++t) {
    const bool record = (t % config.stride == 0);
    TraceRow row;
    if (record) {
      row.t = t;
      row.kkt_residual = eval_kkt_residual(problem, state.x, state.lambda);
      if (kstar.has_value()) {
        Eigen::VectorXd stacked(sol_stacked.size());
        stacked << state.x, state.lambda;
        row.iter_error = (stacked - sol_stacked).norm();
      }
      if (config.record_merit) {
        row.merit = merit_value(problem, state.x, state.lambda, config.merit_params);
      }
    }
    StepInfo info;
    try {
      info = step(state, problem, config);
    } catch (const DivergenceError& e) {
      throw RunError(std::string("run aborted: ") + e.what(), e.iteration,
                     std::move(trace));
    } catch (const SingularKktError& e) {
      throw RunError("run aborted at iteration " + std::to_string(state.t) + ": " +
                         e.what(),
                     state.t, std::move(trace));
    }
    if (record) {
      row.alpha = info.alpha;
      row.beta = info.beta;
      row.delta_magnitude = info.delta_magnitude;
      if (kstar.has_value()) {
        row.hess_error = spectral_norm(state.last_kkt.K - *kstar);
      }
      trace.push_back(std::move(row));
    }
  }

  RunResult result;
  result.trace = std::move(trace);
  result.x = state.x;
  result.lambda = state.lambda;
  result.iterations = state.t;
  result.final_kkt_residual = eval_kkt_residual(problem, state.x, state.lambda);
  result.gradient_moments = state.gradient_moments;
  result.final_kkt = current_kkt(state, problem, config.pd_floor);
  return result;
}

double merit_value(const ProblemSpec& problem, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& lambda, const MeritParams& params) {
  const Eigen::VectorXd c = problem.constraints(x);
  const Eigen::VectorXd grad_lag =
      problem.gradient(x) + problem.constraint_jacobian(x).transpose() * lambda;
  return problem.objective(x) + lambda.dot(c) + 0.5 * params.mu * c.squaredNorm() +
         0.5 * params.nu * grad_lag.squaredNorm();
}

Eigen::VectorXd merit_gradient(const ProblemSpec& problem, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& lambda, const MeritParams& params) {
  const int d = problem.dim_primal;
  const int m = problem.dim_dual;
  const Eigen::MatrixXd g = problem.constraint_jacobian(x);
  const Eigen::VectorXd c = problem.constraints(x);
  const Eigen::VectorXd grad_lag = problem.gradient(x) + g.transpose() * lambda;
  const Eigen::MatrixXd lag_hess = problem.lagrangian_hessian(x, lambda);
  Eigen::VectorXd out(d + m);
  out.head(d) = grad_lag + params.nu * lag_hess * grad_lag + params.mu * g.transpose() * c;
  out.tail(m) = params.nu * g * grad_lag + c;
  return out;
}

OracleResult deterministic_sqp_oracle(const ProblemSpec& problem,
                                      const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& lambda0, long max_iter,
                                      double tol, double pd_floor) {
  const int d = problem.dim_primal;
  const int m = problem.dim_dual;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd lambda = lambda0;
  for (long it = 0; it < max_iter; ++it) {
    const double residual = eval_kkt_residual(problem, x, lambda);
    if (residual <= tol) {
      return {x, lambda, it, residual};
    }
    const Eigen::MatrixXd g = problem.constraint_jacobian(x);
    const Regularized reg =
        regularize(problem.lagrangian_hessian(x, lambda), g, 1, pd_floor);
    const KktSystem sys = assemble_kkt(reg.B, g);
    Eigen::VectorXd rhs(d + m);
    rhs.head(d) = -(problem.gradient(x) + g.transpose() * lambda);
    rhs.tail(m) = -problem.constraints(x);
    const Eigen::VectorXd z = solve_exact(sys.K, rhs);
    x += z.head(d);
    lambda += z.tail(m);
    if (!x.allFinite() || !lambda.allFinite()) {
      throw OracleError("deterministic SQP reference diverged on '" + problem.name + "'");
    }
  }
  const double residual = eval_kkt_residual(problem, x, lambda);
  if (residual <= tol) {
    return {x, lambda, max_iter, residual};
  }
  throw OracleError("deterministic SQP reference did not reach tol " +
                    std::to_string(tol) + " on '" + problem.name +
                    "' within " + std::to_string(max_iter) + " iterations");
}

}  // namespace stosqp
