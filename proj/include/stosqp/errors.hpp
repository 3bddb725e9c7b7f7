// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace stosqp {

// Configuration mistakes: mismatched dimensions, unknown names, invalid levels.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The constraint Jacobian lost full row rank.
struct ConstraintQualificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularKktError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration(iteration) {}
  long iteration = 0;
};

// The deterministic reference solver failed to certify a solution.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Schedule outside the regime required by the covariance normalization.
struct InvalidScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Query direction w with w^T Xi w <= 0.
struct DegenerateDirectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stosqp
