// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <json.hpp>

#include "stosqp/errors.hpp"

namespace stosqp {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "stosqp 0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<long>(v));
  return out;
}

// Runs fn(0..count-1); results must be written into index-addressed slots so
// aggregation order never depends on scheduling.
template <typename Fn>
void parallel_for_index(long count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<long>(threads, count));
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (long i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

json provenance(const ExperimentConfig& config) {
  json p;
  p["version"] = kVersion;
  p["config_hash"] = config.config_hash();
  p["seed"] = config.seed;
  json c;
  c["problem"] = config.problem;
  c["sigma2"] = config.sigma2;
  c["c1"] = config.c1;
  c["c2"] = config.c2;
  c["c3"] = config.c3;
  c["tau"] = config.tau;
  c["sketch"] = config.sketch;
  c["policy"] = config.policy;
  c["iters"] = config.iters;
  c["stride"] = config.stride;
  c["runs"] = config.runs;
  c["burnin"] = config.burnin;
  c["level"] = config.level;
  c["w"] = config.w;
  c["pd_floor"] = config.pd_floor;
  c["normality_mode"] = config.normality_mode;
  c["mc_samples"] = config.mc_samples;
  c["eps"] = config.eps;
  c["taus"] = config.taus;
  p["config"] = c;
  return p;
}

std::string emit(const json& summary, const std::string& out_prefix) {
  const std::string text = summary.dump(2) + "\n";
  write_file(out_prefix + ".json", text);
  return text;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Least-squares slope of log y against log t over recorded (t, y) pairs.
double loglog_slope(const std::vector<std::pair<long, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (const auto& [t, y] : points) {
    if (t < 1 || !(y > 0.0)) continue;
    const double lx = std::log(static_cast<double>(t));
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::string out;
  out += "problem = " + problem + "\n";
  out += "sigma2 = " + fmt(sigma2) + "\n";
  out += "c1 = " + fmt(c1) + "\n";
  out += "c2 = " + fmt(c2) + "\n";
  out += "c3 = " + fmt(c3) + "\n";
  out += "tau = " + std::to_string(tau) + "\n";
  out += "sketch = " + sketch + "\n";
  out += "policy = " + policy + "\n";
  out += "iters = " + std::to_string(iters) + "\n";
  out += "stride = " + std::to_string(stride) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  out += "runs = " + std::to_string(runs) + "\n";
  out += "burnin = " + fmt(burnin) + "\n";
  out += "level = " + fmt(level) + "\n";
  out += "w = " + w + "\n";
  out += "pd_floor = " + fmt(pd_floor) + "\n";
  out += "normality_mode = " + normality_mode + "\n";
  out += "mc_samples = " + std::to_string(mc_samples) + "\n";
  out += "eps = " + eps + "\n";
  out += "taus = " + taus + "\n";
  // threads is an execution knob, not part of the experiment identity.
  return out;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig config;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line without '=': " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "problem") config.problem = value;
    else if (key == "sigma2") config.sigma2 = std::stod(value);
    else if (key == "c1") config.c1 = std::stod(value);
    else if (key == "c2") config.c2 = std::stod(value);
    else if (key == "c3") config.c3 = std::stod(value);
    else if (key == "tau") config.tau = std::stol(value);
    else if (key == "sketch") config.sketch = value;
    else if (key == "policy") config.policy = value;
    else if (key == "iters") config.iters = std::stol(value);
    else if (key == "stride") config.stride = std::stol(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "runs") config.runs = std::stol(value);
    else if (key == "burnin") config.burnin = std::stod(value);
    else if (key == "level") config.level = std::stod(value);
    else if (key == "w") config.w = value;
    else if (key == "pd_floor") config.pd_floor = std::stod(value);
    else if (key == "normality_mode") config.normality_mode = value;
    else if (key == "mc_samples") config.mc_samples = std::stol(value);
    else if (key == "eps") config.eps = value;
    else if (key == "taus") config.taus = value;
    else if (key == "threads") config.threads = std::stoi(value);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return config;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::string ExperimentConfig::config_hash() const {
  // FNV-1a 64.
  const std::string text = serialize();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig ExperimentConfig::run_config(uint64_t run_index) const {
  RunConfig rc;
  rc.noise = NoiseModel{sigma2};
  rc.sched = schedule();
  rc.policy = step_policy();
  rc.dist = sketch_distribution();
  rc.tau = tau;
  rc.pd_floor = pd_floor;
  rc.iterations = iters;
  rc.stride = stride;
  rc.master_seed = seed;
  rc.run_index = run_index;
  return rc;
}

Eigen::VectorXd ExperimentConfig::direction(int d, int m) const {
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(d + m);
  if (w.empty()) {
    dir(0) = 1.0;
    dir(d) = 1.0;
    return dir;
  }
  std::stringstream ss(w);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("direction entry '" + item + "' is not index:value");
    }
    const int idx = std::stoi(item.substr(0, colon));
    if (idx < 0 || idx >= d + m) {
      throw ConfigError("direction index " + std::to_string(idx) + " out of range");
    }
    dir(idx) = std::stod(item.substr(colon + 1));
  }
  if (dir.isZero()) throw ConfigError("direction w must be nonzero");
  return dir;
}

double theory_rate(const Schedule& sched, long t) {
  if (t < 1) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(envelope(sched, t).beta * std::log(static_cast<double>(t)));
}

std::string cmd_run(const ExperimentConfig& config, const std::string& out_prefix) {
  const ProblemSpec problem = builtin_problem(config.problem);
  const Schedule sched = config.schedule();
  std::string csv = "t,kkt_residual,iter_error,hess_error,alpha,beta,delta_mag,theory_rate\n";
  auto append_rows = [&](const std::vector<TraceRow>& trace) {
    for (const TraceRow& row : trace) {
      csv += std::to_string(row.t);
      csv += ',' + fmt(row.kkt_residual);
      csv += ',' + (row.iter_error ? fmt(*row.iter_error) : std::string());
      csv += ',' + (row.hess_error ? fmt(*row.hess_error) : std::string());
      csv += ',' + fmt(row.alpha);
      csv += ',' + fmt(row.beta);
      csv += ',' + fmt(row.delta_magnitude);
      const double rate = theory_rate(sched, row.t);
      csv += ',' + (std::isfinite(rate) ? fmt(rate) : std::string());
      csv += '\n';
    }
  };

  json summary;
  summary["command"] = "run";
  summary["provenance"] = provenance(config);
  try {
    const RunResult result = run(problem, config.run_config(0));
    append_rows(result.trace);
    summary["rows"] = result.trace.size();
    summary["iterations"] = result.iterations;
    summary["final_kkt_residual"] = result.final_kkt_residual;
    if (problem.known_solution.has_value()) {
      Eigen::VectorXd stacked(problem.dim_primal + problem.dim_dual);
      stacked << result.x, result.lambda;
      Eigen::VectorXd target(stacked.size());
      target << problem.known_solution->x, problem.known_solution->lambda;
      summary["final_iter_error"] = (stacked - target).norm();
    }
    summary["status"] = "ok";
  } catch (const RunError& e) {
    append_rows(e.partial_trace);
    summary["rows"] = e.partial_trace.size();
    summary["status"] = "aborted";
    summary["error"] = e.what();
    summary["error_iteration"] = e.iteration;
  }
  write_file(out_prefix + ".csv", csv);
  return emit(summary, out_prefix);
}

std::string cmd_normality(const ExperimentConfig& config, const std::string& out_prefix) {
  const ProblemSpec problem = builtin_problem(config.problem);
  if (!problem.known_solution.has_value()) {
    throw ConfigError("normality: problem '" + config.problem + "' has no known solution");
  }
  const auto& sol = *problem.known_solution;
  const Schedule sched = config.schedule();

  json summary;
  summary["command"] = "normality";
  summary["provenance"] = provenance(config);
  summary["mode"] = config.normality_mode;
  std::string csv;

  if (config.normality_mode == "within") {
    // Tail errors of a single trajectory, burn-in discarded.
    RunState state = RunState::init(problem, config.seed, 0);
    const RunConfig rc = config.run_config(0);
    const long burn = static_cast<long>(config.burnin * static_cast<double>(config.iters));
    std::vector<double> x_err, l_err;
    csv = "t,x1_err,lambda1_err\n";
    for (long t = 0; t < config.iters; ++t) {
      if (t >= burn) {
        const double xe = state.x(0) - sol.x(0);
        const double le = state.lambda(0) - sol.lambda(0);
        x_err.push_back(xe);
        l_err.push_back(le);
        csv += std::to_string(t) + ',' + fmt(xe) + ',' + fmt(le) + '\n';
      }
      step(state, problem, rc);
    }
    const NormalityReport rx = normality_diagnostics(x_err);
    const NormalityReport rl = normality_diagnostics(l_err);
    summary["samples"] = static_cast<long>(x_err.size());
    summary["x1"] = {{"ks", rx.ks_statistic}, {"mean", rx.mean}, {"variance", rx.variance}};
    summary["lambda1"] = {{"ks", rl.ks_statistic}, {"mean", rl.mean}, {"variance", rl.variance}};
  } else if (config.normality_mode == "mc") {
    if (config.runs < 50) throw ConfigError("normality mc mode: need runs >= 50");
    const Eigen::VectorXd w = config.direction(problem.dim_primal, problem.dim_dual);
    RngStream oracle_rng(derive_seed(config.seed, 0x0AC1Eull), 0);
    const Eigen::MatrixXd xi_star =
        exact_covariance_oracle(problem, NoiseModel{config.sigma2}, sched,
                                config.sketch_distribution(), config.tau,
                                config.mc_samples, &oracle_rng);
    const double w_xi_w = w.dot(xi_star * w);
    const double beta_T = envelope(sched, config.iters).beta;
    Eigen::VectorXd target(problem.dim_primal + problem.dim_dual);
    target << sol.x, sol.lambda;

    std::vector<double> errors(config.runs);
    parallel_for_index(config.runs, config.threads, [&](long i) {
      const RunResult result = run(problem, config.run_config(i));
      Eigen::VectorXd stacked(target.size());
      stacked << result.x, result.lambda;
      errors[i] = w.dot(stacked - target);
    });

    const bool degenerate = !(w_xi_w > 1e-300);
    std::vector<double> standardized(errors.size());
    for (size_t i = 0; i < errors.size(); ++i) {
      standardized[i] = degenerate ? errors[i]
                                   : errors[i] / std::sqrt(beta_T * w_xi_w);
    }
    csv = "run,error,standardized\n";
    for (size_t i = 0; i < errors.size(); ++i) {
      csv += std::to_string(i) + ',' + fmt(errors[i]) + ',' + fmt(standardized[i]) + '\n';
    }
    const NormalityReport report = normality_diagnostics(standardized);
    summary["samples"] = static_cast<long>(standardized.size());
    summary["degenerate"] = degenerate;
    summary["w_xi_w"] = w_xi_w;
    summary["beta_T"] = beta_T;
    summary["ks"] = report.ks_statistic;
    summary["ks_raw"] = report.ks_raw;
    summary["mean"] = report.mean;
    summary["variance"] = report.variance;
  } else {
    throw ConfigError("normality_mode must be 'within' or 'mc'");
  }
  write_file(out_prefix + ".csv", csv);
  return emit(summary, out_prefix);
}

std::string cmd_coverage(const ExperimentConfig& config, const std::string& out_prefix) {
  const ProblemSpec problem = builtin_problem(config.problem);
  if (!problem.known_solution.has_value()) {
    throw ConfigError("coverage: problem '" + config.problem + "' has no known solution");
  }
  if (config.runs < 100) throw ConfigError("coverage: need runs >= 100");
  const Schedule sched = config.schedule();
  const Eigen::VectorXd w = config.direction(problem.dim_primal, problem.dim_dual);
  Eigen::VectorXd target_vec(problem.dim_primal + problem.dim_dual);
  target_vec << problem.known_solution->x, problem.known_solution->lambda;
  const double target = w.dot(target_vec);

  struct PerRun {
    Interval interval;
    bool covered = false;
    bool degenerate = false;
  };
  std::vector<PerRun> rows(config.runs);
  parallel_for_index(config.runs, config.threads, [&](long i) {
    const RunResult result = run(problem, config.run_config(i));
    PerRun& slot = rows[i];
    try {
      const Eigen::MatrixXd xi =
          covariance_estimate(result.gradient_moments, result.final_kkt.K, sched);
      slot.interval = confidence_interval(result.x, result.lambda, xi,
                                          ConfidenceQuery{w, config.level},
                                          result.iterations, sched);
      slot.covered = slot.interval.lo <= target && target <= slot.interval.hi;
    } catch (const DegenerateDirectionError&) {
      slot.degenerate = true;
    }
  });

  std::string csv = "run,lo,hi,width,covered,degenerate\n";
  long covered = 0;
  long degenerate = 0;
  double width_sum = 0.0;
  for (long i = 0; i < config.runs; ++i) {
    const PerRun& slot = rows[i];
    if (slot.degenerate) {
      ++degenerate;
      csv += std::to_string(i) + ",,,,,1\n";
      continue;
    }
    covered += slot.covered ? 1 : 0;
    width_sum += slot.interval.hi - slot.interval.lo;
    csv += std::to_string(i) + ',' + fmt(slot.interval.lo) + ',' + fmt(slot.interval.hi) +
           ',' + fmt(slot.interval.hi - slot.interval.lo) + ',' +
           (slot.covered ? "1" : "0") + ",0\n";
  }
  const long valid = config.runs - degenerate;

  json summary;
  summary["command"] = "coverage";
  summary["provenance"] = provenance(config);
  summary["target"] = target;
  summary["runs"] = config.runs;
  summary["runs_degenerate"] = degenerate;
  summary["coverage"] = valid > 0 ? static_cast<double>(covered) / valid
                                  : std::numeric_limits<double>::quiet_NaN();
  summary["mean_width"] = valid > 0 ? width_sum / valid
                                    : std::numeric_limits<double>::quiet_NaN();
  summary["nominal_level"] = config.level;
  write_file(out_prefix + ".csv", csv);
  return emit(summary, out_prefix);
}

std::string cmd_sketch_audit(const ExperimentConfig& config, const std::string& out_prefix) {
  Eigen::MatrixXd k;
  if (config.problem.rfind("random:", 0) == 0) {
    const int n = std::stoi(config.problem.substr(7));
    if (n < 2) throw ConfigError("sketch-audit: random matrix size must be >= 2");
    RngStream rng(derive_seed(config.seed, 0xAD17), 0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.next_normal();
    k = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    if (lmin < 0.5) k += (0.5 - lmin) * Eigen::MatrixXd::Identity(n, n);
  } else {
    const ProblemSpec problem = builtin_problem(config.problem);
    if (!problem.known_solution.has_value()) {
      throw ConfigError("sketch-audit: problem '" + config.problem + "' has no known solution");
    }
    k = exact_kkt_matrix(problem, problem.known_solution->x, problem.known_solution->lambda);
  }

  const SketchDistribution dist = config.sketch_distribution();
  RngStream audit_rng(derive_seed(config.seed, 0xA0D1), 0);
  const ContractionAudit audit =
      contraction_audit(k, dist, config.mc_samples, &audit_rng);

  const int n = static_cast<int>(k.rows());
  RngStream rhs_rng(derive_seed(config.seed, 0xB0B), 0);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = rhs_rng.next_normal();
  const Eigen::VectorXd z_exact = solve_exact(k, rhs);
  const double z_norm_sq = z_exact.squaredNorm();

  json table = json::array();
  std::string csv = "tau,rho_pow_tau,mc_mean_sq_ratio,mc_mean_norm_ratio\n";
  for (long tau : parse_long_list(config.taus)) {
    double mean_sq = 0.0;
    Eigen::VectorXd mean_err = Eigen::VectorXd::Zero(n);
    const long trials = std::max<long>(config.runs, 1);
    if (dist.kind != SketchKind::kExact) {
      RngStream solve_rng(derive_seed(config.seed, 0x50 + static_cast<uint64_t>(tau)), 0);
      for (long s = 0; s < trials; ++s) {
        const SolveReport rep = solve_inexact(k, rhs, tau, dist, solve_rng);
        const Eigen::VectorXd err = rep.z - z_exact;
        mean_sq += err.squaredNorm();
        mean_err += err;
      }
      mean_sq /= static_cast<double>(trials);
      mean_err /= static_cast<double>(trials);
    }
    const double rho_pow = std::pow(audit.rho, static_cast<double>(tau));
    const double sq_ratio = mean_sq / z_norm_sq;
    const double norm_ratio = mean_err.norm() / std::sqrt(z_norm_sq);
    csv += std::to_string(tau) + ',' + fmt(rho_pow) + ',' + fmt(sq_ratio) + ',' +
           fmt(norm_ratio) + '\n';
    table.push_back({{"tau", tau},
                     {"rho_pow_tau", rho_pow},
                     {"mc_mean_sq_ratio", sq_ratio},
                     {"mc_mean_norm_ratio", norm_ratio}});
  }

  json summary;
  summary["command"] = "sketch-audit";
  summary["provenance"] = provenance(config);
  summary["n"] = n;
  summary["gamma_s"] = audit.gamma_s;
  summary["rho"] = audit.rho;
  summary["assumption_ok"] = audit.assumption_ok;
  summary["table"] = table;
  // Which (c1, c2, c3) regimes the configured schedule satisfies under the
  // audited contraction rate.
  const RegimeReport regimes =
      validate_schedule(config.schedule(), audit.rho, config.tau);
  summary["schedule_regimes"] = {{"global", regimes.global},
                                 {"rate", regimes.rate},
                                 {"normality", regimes.normality},
                                 {"rho_pow_tau", regimes.rho_tau}};
  write_file(out_prefix + ".csv", csv);
  return emit(summary, out_prefix);
}

std::string cmd_complexity(const ExperimentConfig& config, const std::string& out_prefix) {
  const ProblemSpec problem = builtin_problem(config.problem);
  const std::vector<double> eps_list = parse_double_list(config.eps);
  if (eps_list.empty()) throw ConfigError("complexity: eps list is empty");
  const long seeds = std::max<long>(config.runs, 1);
  const long iters = config.iters;

  // Per-seed running mean of the KKT residual (for T_eps) and the raw
  // squared residuals (for the rate diagnostics).
  std::vector<std::vector<double>> mean_res(seeds), raw_sq(seeds);
  parallel_for_index(seeds, config.threads, [&](long s) {
    RunState state = RunState::init(problem, config.seed, static_cast<uint64_t>(s));
    const RunConfig rc = config.run_config(static_cast<uint64_t>(s));
    auto& rm = mean_res[s];
    auto& rs = raw_sq[s];
    rm.resize(iters);
    rs.resize(iters);
    double acc_res = 0.0;
    for (long t = 0; t < iters; ++t) {
      const double res = eval_kkt_residual(problem, state.x, state.lambda);
      acc_res += res;
      rm[t] = acc_res / static_cast<double>(t + 1);
      rs[t] = res * res;
      step(state, problem, rc);
    }
  });

  json per_seed_teps = json::array();
  std::vector<std::vector<double>> teps_by_eps(eps_list.size());
  for (long s = 0; s < seeds; ++s) {
    json row = json::array();
    for (size_t e = 0; e < eps_list.size(); ++e) {
      long hit = -1;
      for (long t = 0; t < iters; ++t) {
        if (mean_res[s][t] <= eps_list[e]) {
          hit = t;
          break;
        }
      }
      row.push_back(hit);
      if (hit >= 0) teps_by_eps[e].push_back(static_cast<double>(hit));
    }
    per_seed_teps.push_back(row);
  }

  json medians = json::array();
  json censored = json::array();
  for (size_t e = 0; e < eps_list.size(); ++e) {
    const long reached = static_cast<long>(teps_by_eps[e].size());
    censored.push_back(seeds - reached);
    if (reached * 2 >= seeds && reached > 0) {
      medians.push_back(median_of(teps_by_eps[e]));
    } else {
      medians.push_back(nullptr);  // right-censored for most seeds
    }
  }

  // Slope of the mean squared residual accumulated over the fit window
  // [100, iters]; the overshoot iterations before eta_t falls below one
  // would otherwise contribute a 1/t mass that hides the stationary decay.
  std::vector<double> slopes(seeds);
  const long window_start = std::min<long>(100, iters / 10);
  for (long s = 0; s < seeds; ++s) {
    std::vector<std::pair<long, double>> pts;
    double acc = 0.0;
    long count = 0;
    for (long t = window_start; t < iters; ++t) {
      acc += raw_sq[s][t];
      ++count;
      if (count >= window_start && t % 25 == 0) {
        pts.emplace_back(t, acc / static_cast<double>(count));
      }
    }
    slopes[s] = loglog_slope(pts);
  }
  double slope_mean = 0.0;
  for (double v : slopes) slope_mean += v;
  slope_mean /= static_cast<double>(seeds);

  std::vector<std::vector<double>> mean_sq(seeds);
  for (long s = 0; s < seeds; ++s) {
    mean_sq[s].resize(iters);
    double acc = 0.0;
    for (long t = 0; t < iters; ++t) {
      acc += raw_sq[s][t];
      mean_sq[s][t] = acc / static_cast<double>(t + 1);
    }
  }
  std::string csv = "t,median_running_mean,median_running_mean_sq\n";
  for (long t = 0; t < iters; t += config.stride) {
    std::vector<double> col_res(seeds), col_sq(seeds);
    for (long s = 0; s < seeds; ++s) {
      col_res[s] = mean_res[s][t];
      col_sq[s] = mean_sq[s][t];
    }
    csv += std::to_string(t) + ',' + fmt(median_of(col_res)) + ',' +
           fmt(median_of(col_sq)) + '\n';
  }

  json summary;
  summary["command"] = "complexity";
  summary["provenance"] = provenance(config);
  summary["eps"] = eps_list;
  summary["median_T_eps"] = medians;
  summary["censored_runs"] = censored;
  summary["per_seed_T_eps"] = per_seed_teps;
  summary["slope_mean_sq_residual"] = slope_mean;
  json slope_arr = json::array();
  for (double v : slopes) slope_arr.push_back(v);
  summary["per_seed_slopes"] = slope_arr;
  write_file(out_prefix + ".csv", csv);
  return emit(summary, out_prefix);
}

std::string list_problems() {
  std::string out;
  for (const std::string& name : builtin_problem_names()) {
    const ProblemSpec p = builtin_problem(name);
    out += p.name + ": d=" + std::to_string(p.dim_primal) +
           " m=" + std::to_string(p.dim_dual) +
           " known_solution=" + (p.known_solution ? "yes" : "no");
    if (p.known_solution) {
      out += " f_star=" + fmt(p.objective(p.known_solution->x));
    }
    out += "\n";
  }
  return out;
}

}  // namespace stosqp
