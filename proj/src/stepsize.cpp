// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stosqp/errors.hpp"

namespace stosqp {

double Schedule::beta_tilde() const {
  return c2 == 1.0 ? c1 : std::numeric_limits<double>::infinity();
}

double Schedule::limit_ratio() const {
  return c2 == 1.0 ? -c2 / c1 : 0.0;
}

Envelope envelope(const Schedule& sched, long t) {
  const double tt = static_cast<double>(std::max<long>(t, 1));
  Envelope env;
  env.beta = sched.c1 / std::pow(tt, sched.c2);
  env.chi = std::pow(env.beta, sched.c3);
  env.eta = env.beta + env.chi;
  env.phi = env.beta + env.chi / 2.0;
  return env;
}

StepPolicy parse_step_policy(const std::string& text) {
  if (text == "uniform") return StepPolicy::kUniformRandom;
  if (text == "lower") return StepPolicy::kDeterministicLower;
  if (text == "midpoint") return StepPolicy::kDeterministicMidpoint;
  throw ConfigError("unknown step policy '" + text + "'; expected one of: uniform, lower, midpoint");
}

std::string to_string(StepPolicy policy) {
  switch (policy) {
    case StepPolicy::kUniformRandom: return "uniform";
    case StepPolicy::kDeterministicLower: return "lower";
    case StepPolicy::kDeterministicMidpoint: return "midpoint";
  }
  return "uniform";
}

double draw_stepsize(StepPolicy policy, double beta, double eta, RngStream& rng) {
  switch (policy) {
    case StepPolicy::kUniformRandom: return beta + (eta - beta) * rng.next_uniform();
    case StepPolicy::kDeterministicLower: return beta;
    case StepPolicy::kDeterministicMidpoint: return (beta + eta) / 2.0;
  }
  return beta;
}

std::string RegimeReport::describe() const {
  std::string out = "global=";
  out += global ? "yes" : "no";
  out += " rate=";
  out += rate ? "yes" : "no";
  out += " normality=";
  out += normality ? "yes" : "no";
  return out;
}

RegimeReport validate_schedule(const Schedule& sched, double rho, long tau,
                               std::optional<double> omega) {
  RegimeReport report;
  report.rho_tau = std::pow(rho, static_cast<double>(tau));
  const double c1 = sched.c1;
  const double c2 = sched.c2;
  const double c3 = sched.c3;
  const double contraction = 1.0 - report.rho_tau;

  report.global = c1 > 0.0 && c2 > 0.5 && c2 <= 1.0 && c3 > 1.0 / c2;

  const bool rate_unit = c2 == 1.0 && c3 > 1.0 &&
                         c1 > std::max(1.0, c3 - 0.5) / contraction;
  const bool rate_sub = c2 > 0.5 && c2 < 1.0 && c1 > 0.0 && c3 > 1.0 / c2;
  report.rate = report.global && (rate_unit || rate_sub);

  // With a known omega the c2 = 1 branch needs c1 > ((0.5 - omega) v (c3 - 0.5)) / (1 - rho^tau);
  // when the regularization vanishes the omega term drops out of the bound.
  double unit_bound = (c3 - 0.5) / contraction;
  if (omega.has_value()) {
    unit_bound = std::max(0.5 - *omega, c3 - 0.5) / contraction;
  }
  const bool normality_unit = c2 == 1.0 && c3 > 1.5 && c1 > unit_bound;
  const bool normality_sub =
      c2 > 0.5 && c2 < 1.0 && c1 > 0.0 && c3 > std::max(1.5, 1.0 / c2);
  report.normality = report.rate && (normality_unit || normality_sub);
  return report;
}

}  // namespace stosqp
