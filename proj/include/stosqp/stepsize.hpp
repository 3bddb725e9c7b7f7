// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "stosqp/rng.hpp"

namespace stosqp {

// Stepsize envelope sequences
//   beta_t = c1 / t^c2,  chi_t = beta_t^c3,  eta_t = beta_t + chi_t,
// with the limit constants used by the covariance normalization:
//   beta_lim  = lim t (1 - beta_{t-1}/beta_t) = -c2
//   beta_tilde = lim t beta_t  (c1 when c2 = 1, +inf when c2 < 1)
//   chi_lim   = -c2 c3.
struct Schedule {
  double c1 = 2.0;
  double c2 = 0.7;
  double c3 = 2.0;

  double beta_lim() const { return -c2; }
  double beta_tilde() const;
  double chi_lim() const { return -c2 * c3; }

  // beta_lim / beta_tilde: 0 when c2 < 1, -c2/c1 when c2 = 1.
  double limit_ratio() const;
};

struct Envelope {
  double beta = 0.0;
  double chi = 0.0;
  double eta = 0.0;
  double phi = 0.0;  // (beta + eta)/2
};

// t = 0 maps to the t = 1 values; the sequences are only consumed for t >= 1
// asymptotically and this avoids a division by zero at the first iteration.
Envelope envelope(const Schedule& sched, long t);

enum class StepPolicy { kUniformRandom, kDeterministicLower, kDeterministicMidpoint };

StepPolicy parse_step_policy(const std::string& text);
std::string to_string(StepPolicy policy);

// Draws alpha in [beta, eta]; uniform policy consumes one uniform variate.
double draw_stepsize(StepPolicy policy, double beta, double eta, RngStream& rng);

// Which parameter regimes (c1, c2, c3) satisfies, given the solver
// contraction rho^tau. `omega` is the decay exponent of the regularization
// bound when one is known; without it the report uses the variant where the
// regularization vanishes for large t and the omega conditions drop out.
struct RegimeReport {
  bool global = false;     // almost-sure convergence regime
  bool rate = false;       // adds the local-rate conditions
  bool normality = false;  // adds the CLT conditions
  double rho_tau = 0.0;
  std::string describe() const;
};

RegimeReport validate_schedule(const Schedule& sched, double rho, long tau,
                               std::optional<double> omega = std::nullopt);

}  // namespace stosqp
