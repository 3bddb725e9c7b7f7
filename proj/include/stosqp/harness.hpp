// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "stosqp/solver.hpp"

namespace stosqp {

// Flat key = value experiment description; serializes losslessly so a report
// can always be regenerated from its provenance block.
struct ExperimentConfig {
  std::string problem = "eq_quadratic";
  double sigma2 = 1e-2;
  double c1 = 2.0;
  double c2 = 0.7;
  double c3 = 2.0;
  long tau = 50;
  std::string sketch = "kaczmarz";
  std::string policy = "uniform";
  long iters = 10000;
  long stride = 100;
  uint64_t seed = 1;
  long runs = 200;
  double burnin = 0.5;
  double level = 0.95;
  std::string w;  // "index:value,..." (0-based); empty means e_1 + e_{d+1}
  double pd_floor = 0.1;
  std::string normality_mode = "mc";  // "mc" | "within"
  long mc_samples = 20000;
  std::string eps = "0.3,0.1,0.03";
  std::string taus = "1,5,20,50";
  int threads = 1;

  std::string serialize() const;
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig load_file(const std::string& path);
  std::string config_hash() const;

  Schedule schedule() const { return Schedule{c1, c2, c3}; }
  StepPolicy step_policy() const { return parse_step_policy(policy); }
  SketchDistribution sketch_distribution() const { return SketchDistribution::parse(sketch); }
  RunConfig run_config(uint64_t run_index) const;
  Eigen::VectorXd direction(int d, int m) const;
};

// Each command writes <out>.csv and <out>.json and returns the JSON text.
std::string cmd_run(const ExperimentConfig& config, const std::string& out_prefix);
std::string cmd_normality(const ExperimentConfig& config, const std::string& out_prefix);
std::string cmd_coverage(const ExperimentConfig& config, const std::string& out_prefix);
std::string cmd_sketch_audit(const ExperimentConfig& config, const std::string& out_prefix);
std::string cmd_complexity(const ExperimentConfig& config, const std::string& out_prefix);
std::string list_problems();

// sqrt(beta_t log t); the reference rate drawn on convergence plots.
double theory_rate(const Schedule& sched, long t);

}  // namespace stosqp
