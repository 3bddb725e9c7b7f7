// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/inference.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "stosqp/errors.hpp"

namespace stosqp {

void CovarianceAccumulator::update(const Eigen::VectorXd& g_bar) {
  if (g_bar.size() != sum_.size()) {
    throw ConfigError("CovarianceAccumulator: dimension mismatch");
  }
  sum_ += g_bar;
  sum_outer_ += g_bar * g_bar.transpose();
  ++count_;
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) {
  if (other.sum_.size() != sum_.size()) {
    throw ConfigError("CovarianceAccumulator: merge dimension mismatch");
  }
  sum_ += other.sum_;
  sum_outer_ += other.sum_outer_;
  count_ += other.count_;
}

Eigen::VectorXd CovarianceAccumulator::mean() const {
  if (count_ == 0) throw ConfigError("CovarianceAccumulator: empty");
  return sum_ / static_cast<double>(count_);
}

Eigen::MatrixXd CovarianceAccumulator::sample_covariance() const {
  if (count_ == 0) throw ConfigError("CovarianceAccumulator: empty");
  const Eigen::VectorXd m = mean();
  Eigen::MatrixXd cov = sum_outer_ / static_cast<double>(count_) - m * m.transpose();
  return 0.5 * (cov + cov.transpose());
}

namespace {

double schedule_ratio_or_throw(const Schedule& sched) {
  const double r = sched.limit_ratio();
  if (2.0 + r <= 0.0) {
    throw InvalidScheduleError(
        "covariance normalization needs 2 + beta_lim/beta_tilde > 0 (c2 = 1 requires c1 > 1/2)");
  }
  return r;
}

Eigen::MatrixXd invert_or_throw(const Eigen::MatrixXd& K) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible()) {
    throw SingularKktError("covariance estimate: KKT matrix is singular");
  }
  return lu.inverse();
}

}  // namespace

Eigen::MatrixXd covariance_estimate(const CovarianceAccumulator& acc,
                                    const Eigen::MatrixXd& K, const Schedule& sched) {
  if (acc.count() < 2) {
    throw ConfigError("covariance_estimate: needs at least two gradient samples");
  }
  const double r = schedule_ratio_or_throw(sched);
  const int d = static_cast<int>(acc.mean().size());
  const int n = static_cast<int>(K.rows());
  const Eigen::MatrixXd kinv = invert_or_throw(K);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, n);
  padded.topLeftCorner(d, d) = acc.sample_covariance();
  Eigen::MatrixXd xi = kinv * padded * kinv / (2.0 + r);
  return 0.5 * (xi + xi.transpose());
}

Eigen::MatrixXd exact_covariance_oracle(const ProblemSpec& problem, const NoiseModel& noise,
                                        const Schedule& sched, const SketchDistribution& dist,
                                        long tau, long mc_samples, RngStream* rng) {
  if (!problem.known_solution.has_value()) {
    throw OracleError("exact_covariance_oracle: problem '" + problem.name +
                      "' has no known solution");
  }
  const double r = schedule_ratio_or_throw(sched);
  const auto& sol = *problem.known_solution;
  const int d = problem.dim_primal;
  const int m = problem.dim_dual;
  const int n = d + m;

  Eigen::MatrixXd kstar = Eigen::MatrixXd::Zero(n, n);
  kstar.topLeftCorner(d, d) = problem.lagrangian_hessian(sol.x, sol.lambda);
  const Eigen::MatrixXd g = problem.constraint_jacobian(sol.x);
  kstar.topRightCorner(d, m) = g.transpose();
  kstar.bottomLeftCorner(m, d) = g;
  const Eigen::MatrixXd kinv = invert_or_throw(kstar);

  // Gradient noise covariance sigma2 (I + 11^T), independent of the iterate.
  Eigen::MatrixXd noise_cov =
      noise.sigma2 *
      (Eigen::MatrixXd::Identity(d, d) + Eigen::MatrixXd::Ones(d, d));
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, n);
  padded.topLeftCorner(d, d) = noise_cov;
  const Eigen::MatrixXd omega = kinv * padded * kinv;

  if (dist.kind == SketchKind::kExact) {
    Eigen::MatrixXd xi = omega / (2.0 + r);
    return 0.5 * (xi + xi.transpose());
  }

  if (rng == nullptr || mc_samples < 1) {
    throw ConfigError("exact_covariance_oracle: sketch mode needs mc_samples and an rng");
  }
  const ContractionAudit audit =
      contraction_audit(kstar, dist, std::max<long>(mc_samples, 1), rng);
  // I + C* shares eigenvectors with E[P]: sigma_i = 1 - (1 - gamma_i)^tau.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (audit.mean_projection + audit.mean_projection.transpose()));
  const Eigen::MatrixXd u = eig.eigenvectors();
  Eigen::VectorXd sigma(n);
  for (int i = 0; i < n; ++i) {
    sigma(i) = 1.0 - std::pow(1.0 - eig.eigenvalues()(i), static_cast<double>(tau));
  }

  // M = E[(I + C~)(Omega*)(I + C~)^T] over products of tau iid projections.
  Eigen::MatrixXd mhat = Eigen::MatrixXd::Zero(n, n);
  for (long s = 0; s < mc_samples; ++s) {
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
    for (long j = 0; j < tau; ++j) {
      const Eigen::MatrixXd sk = dist.sample(n, *rng);
      if (sk.cols() == 1) {
        const Eigen::VectorXd ks = kstar * sk.col(0);
        const double denom = ks.squaredNorm();
        if (denom > 0.0) prod -= (prod * ks) * (ks.transpose() / denom);
      } else {
        const Eigen::MatrixXd ksb = kstar * sk;
        const Eigen::MatrixXd gram = ksb.transpose() * ksb;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& sing = svd.singularValues();
        const double cutoff = 1e-12 * sing(0);
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(sing.size());
        for (int i = 0; i < sing.size(); ++i) {
          if (sing(i) > cutoff) inv(i) = 1.0 / sing(i);
        }
        prod -= prod * ksb * svd.matrixV() * inv.asDiagonal() *
                svd.matrixU().transpose() * ksb.transpose();
      }
    }
    const Eigen::MatrixXd i_plus_c = Eigen::MatrixXd::Identity(n, n) - prod;
    mhat += i_plus_c * omega * i_plus_c.transpose();
  }
  mhat /= static_cast<double>(mc_samples);

  Eigen::MatrixXd theta(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      theta(k, l) = 1.0 / (sigma(k) + sigma(l) + r);
    }
  }
  Eigen::MatrixXd xi =
      u * theta.cwiseProduct(u.transpose() * mhat * u) * u.transpose();
  return 0.5 * (xi + xi.transpose());
}

Interval confidence_interval(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                             const Eigen::MatrixXd& xi, const ConfidenceQuery& query,
                             long t, const Schedule& sched) {
  const Eigen::Index n = x.size() + lambda.size();
  if (query.direction.size() != n) {
    throw ConfigError("confidence_interval: direction length mismatch");
  }
  if (!(query.level > 0.0 && query.level < 1.0)) {
    throw ConfigError("confidence_interval: level must lie in (0,1)");
  }
  if (t < 1) throw ConfigError("confidence_interval: t must be >= 1");
  const double quad = query.direction.dot(xi * query.direction);
  if (!(quad > 0.0)) {
    throw DegenerateDirectionError(
        "confidence_interval: w^T Xi w <= 0; the direction carries no limit variance");
  }
  Eigen::VectorXd iterate(n);
  iterate << x, lambda;
  const double z = normal_quantile(0.5 * (1.0 + query.level));
  Interval out;
  out.center = query.direction.dot(iterate);
  out.half_width = z * std::sqrt(sched.c1 * quad) /
                   std::pow(static_cast<double>(t), sched.c2 / 2.0);
  out.lo = out.center - out.half_width;
  out.hi = out.center + out.half_width;
  return out;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("normal_quantile: p must lie in (0,1)");
  }
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    const double rr = q * q;
    x = (((((a[0] * rr + a[1]) * rr + a[2]) * rr + a[3]) * rr + a[4]) * rr + a[5]) * q /
        (((((b[0] * rr + b[1]) * rr + b[2]) * rr + b[3]) * rr + b[4]) * rr + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

namespace {

double ks_against_normal(std::vector<double> sorted) {
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    const double upper = static_cast<double>(i + 1) / n - f;
    const double lower = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(upper, lower));
  }
  return d;
}

}  // namespace

NormalityReport normality_diagnostics(const std::vector<double>& samples) {
  if (samples.size() < 50) {
    throw ConfigError("normality_diagnostics: need at least 50 samples, got " +
                      std::to_string(samples.size()));
  }
  NormalityReport report;
  report.n = static_cast<long>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size() - 1);
  report.mean = mean;
  report.variance = var;
  report.ks_raw = ks_against_normal(samples);
  if (var > 0.0) {
    std::vector<double> standardized(samples.size());
    const double sd = std::sqrt(var);
    for (size_t i = 0; i < samples.size(); ++i) {
      standardized[i] = (samples[i] - mean) / sd;
    }
    report.ks_statistic = ks_against_normal(standardized);
  } else {
    // Degenerate sample set; the raw statistic is the only one defined.
    report.ks_statistic = report.ks_raw;
  }
  return report;
}

}  // namespace stosqp
