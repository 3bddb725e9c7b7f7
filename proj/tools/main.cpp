// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "stosqp/harness.hpp"

namespace {

struct CliOptions {
  stosqp::ExperimentConfig config;
  std::string config_path;
  std::string out = "stosqp_out";
  std::string preset;
};

// File values load first, then explicitly passed flags override them.
void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "config file (key = value lines)");
  cmd->add_option("--problem", opts.config.problem,
                  "problem name (see list-problems), or random:n for sketch-audit");
  cmd->add_option("--sigma2", opts.config.sigma2, "gradient/Hessian noise variance");
  cmd->add_option("--c1", opts.config.c1, "stepsize scale: beta_t = c1/t^c2");
  cmd->add_option("--c2", opts.config.c2, "stepsize decay exponent");
  cmd->add_option("--c3", opts.config.c3, "gap exponent: chi_t = beta_t^c3");
  cmd->add_option("--tau", opts.config.tau, "sketch-and-project iterations per step");
  cmd->add_option("--sketch", opts.config.sketch, "kaczmarz | block:q | gaussian:q | exact");
  cmd->add_option("--policy", opts.config.policy, "uniform | lower | midpoint");
  cmd->add_option("--iters", opts.config.iters, "SQP iterations per run");
  cmd->add_option("--stride", opts.config.stride, "trace recording stride");
  cmd->add_option("--seed", opts.config.seed, "master seed");
  cmd->add_option("--runs", opts.config.runs, "independent runs (or seeds/trials)");
  cmd->add_option("--burnin", opts.config.burnin, "burn-in fraction for within-run mode");
  cmd->add_option("--level", opts.config.level, "confidence level");
  cmd->add_option("--w", opts.config.w, "direction, 0-based index:value pairs (default 0:1,d:1)");
  cmd->add_option("--pd-floor", opts.config.pd_floor, "reduced-Hessian eigenvalue floor");
  cmd->add_option("--mode", opts.config.normality_mode, "normality mode: mc | within");
  cmd->add_option("--mc-samples", opts.config.mc_samples, "Monte-Carlo budget for audits/oracles");
  cmd->add_option("--eps", opts.config.eps, "complexity thresholds, comma separated");
  cmd->add_option("--taus", opts.config.taus, "sketch-audit tau list, comma separated");
  cmd->add_option("--threads", opts.config.threads, "worker threads for independent runs");
  cmd->add_option("--out", opts.out, "output prefix (<out>.csv, <out>.json)");
  cmd->add_option("--preset", opts.preset,
                  "preset 'paper': iters=100000, tau=50, c1=2, c2=0.5, stride=100, runs=1")
      ->check(CLI::IsMember({"paper"}));
}

void finalize(CLI::App* cmd, CliOptions& opts) {
  if (!opts.config_path.empty()) {
    const stosqp::ExperimentConfig from_file =
        stosqp::ExperimentConfig::load_file(opts.config_path);
    // File values fill every field the user did not pass explicitly.
    stosqp::ExperimentConfig& cfg = opts.config;
    auto keep = [&](const char* flag, auto member) {
      if (cmd->count(flag) == 0) cfg.*member = from_file.*member;
    };
    keep("--problem", &stosqp::ExperimentConfig::problem);
    keep("--sigma2", &stosqp::ExperimentConfig::sigma2);
    keep("--c1", &stosqp::ExperimentConfig::c1);
    keep("--c2", &stosqp::ExperimentConfig::c2);
    keep("--c3", &stosqp::ExperimentConfig::c3);
    keep("--tau", &stosqp::ExperimentConfig::tau);
    keep("--sketch", &stosqp::ExperimentConfig::sketch);
    keep("--policy", &stosqp::ExperimentConfig::policy);
    keep("--iters", &stosqp::ExperimentConfig::iters);
    keep("--stride", &stosqp::ExperimentConfig::stride);
    keep("--seed", &stosqp::ExperimentConfig::seed);
    keep("--runs", &stosqp::ExperimentConfig::runs);
    keep("--burnin", &stosqp::ExperimentConfig::burnin);
    keep("--level", &stosqp::ExperimentConfig::level);
    keep("--w", &stosqp::ExperimentConfig::w);
    keep("--pd-floor", &stosqp::ExperimentConfig::pd_floor);
    keep("--mode", &stosqp::ExperimentConfig::normality_mode);
    keep("--mc-samples", &stosqp::ExperimentConfig::mc_samples);
    keep("--eps", &stosqp::ExperimentConfig::eps);
    keep("--taus", &stosqp::ExperimentConfig::taus);
    keep("--threads", &stosqp::ExperimentConfig::threads);
  }
  if (opts.preset == "paper") {
    if (cmd->count("--iters") == 0) opts.config.iters = 100000;
    if (cmd->count("--tau") == 0) opts.config.tau = 50;
    if (cmd->count("--c1") == 0) opts.config.c1 = 2.0;
    if (cmd->count("--c2") == 0) opts.config.c2 = 0.5;
    if (cmd->count("--c3") == 0) opts.config.c3 = 2.0;
    if (cmd->count("--stride") == 0) opts.config.stride = 100;
    if (cmd->count("--sketch") == 0) opts.config.sketch = "kaczmarz";
    if (cmd->count("--policy") == 0) opts.config.policy = "uniform";
    if (cmd->count("--runs") == 0) opts.config.runs = 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic SQP with randomized sketch-and-project Newton solves"};
  app.require_subcommand(1);

  CliOptions opts;
  CLI::App* c_run = app.add_subcommand("run", "single trajectory trace CSV");
  CLI::App* c_norm = app.add_subcommand("normality", "error histogram samples + KS report");
  CLI::App* c_cov = app.add_subcommand("coverage", "confidence-interval coverage report");
  CLI::App* c_audit = app.add_subcommand("sketch-audit", "contraction constants and MC ratios");
  CLI::App* c_cplx = app.add_subcommand("complexity", "iterations-to-threshold table");
  app.add_subcommand("list-problems", "print the problem catalog");
  for (CLI::App* cmd : {c_run, c_norm, c_cov, c_audit, c_cplx}) {
    add_common_flags(cmd, opts);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    const std::string name = active->get_name();
    if (name == "list-problems") {
      std::fputs(stosqp::list_problems().c_str(), stdout);
      return 0;
    }
    finalize(active, opts);
    std::string summary;
    if (name == "run") summary = stosqp::cmd_run(opts.config, opts.out);
    else if (name == "normality") summary = stosqp::cmd_normality(opts.config, opts.out);
    else if (name == "coverage") summary = stosqp::cmd_coverage(opts.config, opts.out);
    else if (name == "sketch-audit") summary = stosqp::cmd_sketch_audit(opts.config, opts.out);
    else if (name == "complexity") summary = stosqp::cmd_complexity(opts.config, opts.out);
    std::fputs(summary.c_str(), stdout);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
