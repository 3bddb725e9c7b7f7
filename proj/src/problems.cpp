// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/problems.hpp"

#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "stosqp/errors.hpp"

namespace stosqp {

namespace {

void check_dims(const ProblemSpec& p, const Eigen::VectorXd& x,
                const Eigen::VectorXd& lambda) {
  if (x.size() != p.dim_primal || lambda.size() != p.dim_dual) {
    throw ConfigError("problem '" + p.name + "': iterate dimension mismatch (got x:" +
                      std::to_string(x.size()) + ", lambda:" + std::to_string(lambda.size()) +
                      ", want " + std::to_string(p.dim_primal) + "/" +
                      std::to_string(p.dim_dual) + ")");
  }
}

double sigmoid(double u) {
  if (u >= 0.0) {
    return 1.0 / (1.0 + std::exp(-u));
  }
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

// Solves [[A, C^T], [C, 0]] (x, lambda) = (b, rhs); the closed form for
// quadratic objectives with affine constraints.
KnownSolution solve_quadratic_kkt(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  const Eigen::MatrixXd& C, const Eigen::VectorXd& rhs) {
  const Eigen::Index d = A.rows();
  const Eigen::Index m = C.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d + m, d + m);
  K.topLeftCorner(d, d) = A;
  K.topRightCorner(d, m) = C.transpose();
  K.bottomLeftCorner(m, d) = C;
  Eigen::VectorXd full_rhs(d + m);
  full_rhs << b, rhs;
  const Eigen::VectorXd z = K.fullPivLu().solve(full_rhs);
  return {z.head(d), z.tail(m)};
}

ProblemSpec make_eq_quadratic() {
  ProblemSpec p;
  p.name = "eq_quadratic";
  p.dim_primal = 2;
  p.dim_dual = 1;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd C(1, 2);
  C << 1.0, 1.0;
  Eigen::VectorXd rhs(1);
  rhs << 2.0;
  p.objective = [A, b](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(A * x) - b.dot(x);
  };
  p.gradient = [A, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - b; };
  p.hessian = [A](const Eigen::VectorXd&) { return A; };
  p.constraints = [C, rhs](const Eigen::VectorXd& x) -> Eigen::VectorXd { return C * x - rhs; };
  p.constraint_jacobian = [C](const Eigen::VectorXd&) { return C; };
  p.constraint_hessian = [](const Eigen::VectorXd&, int) {
    return Eigen::MatrixXd::Zero(2, 2);
  };
  p.x0 = Eigen::VectorXd::Zero(2);
  p.lambda0 = Eigen::VectorXd::Zero(1);
  p.known_solution = solve_quadratic_kkt(A, b, C, rhs);
  return p;
}

ProblemSpec make_hs48() {
  ProblemSpec p;
  p.name = "hs48";
  p.dim_primal = 5;
  p.dim_dual = 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, 5);
  A(0, 0) = 2.0;
  A(1, 1) = 2.0;
  A(1, 2) = -2.0;
  A(2, 1) = -2.0;
  A(2, 2) = 2.0;
  A(3, 3) = 2.0;
  A(3, 4) = -2.0;
  A(4, 3) = -2.0;
  A(4, 4) = 2.0;
  Eigen::MatrixXd C(2, 5);
  C << 1.0, 1.0, 1.0, 1.0, 1.0,
       0.0, 0.0, 1.0, -2.0, -2.0;
  Eigen::VectorXd rhs(2);
  rhs << 5.0, -3.0;
  p.objective = [](const Eigen::VectorXd& x) {
    const double a = x(0) - 1.0;
    const double b = x(1) - x(2);
    const double c = x(3) - x(4);
    return a * a + b * b + c * c;
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(5);
    g(0) = 2.0 * (x(0) - 1.0);
    g(1) = 2.0 * (x(1) - x(2));
    g(2) = -2.0 * (x(1) - x(2));
    g(3) = 2.0 * (x(3) - x(4));
    g(4) = -2.0 * (x(3) - x(4));
    return g;
  };
  p.hessian = [A](const Eigen::VectorXd&) { return A; };
  p.constraints = [C, rhs](const Eigen::VectorXd& x) -> Eigen::VectorXd { return C * x - rhs; };
  p.constraint_jacobian = [C](const Eigen::VectorXd&) { return C; };
  p.constraint_hessian = [](const Eigen::VectorXd&, int) {
    return Eigen::MatrixXd::Zero(5, 5);
  };
  p.x0 = Eigen::VectorXd(5);
  p.x0 << 3.0, 5.0, -3.0, 2.0, -2.0;
  p.lambda0 = Eigen::VectorXd::Zero(2);
  // The KKT system has the gradient offset b with grad f = A x - b.
  Eigen::VectorXd b(5);
  b << 2.0, 0.0, 0.0, 0.0, 0.0;
  p.known_solution = solve_quadratic_kkt(A, b, C, rhs);
  return p;
}

// Sphere-constrained variant of the HS7 objective: the feasible set is the
// curve (1 + x1^2)^2 + x2^2 = 4; the minimizer sits at (0, sqrt(3)).
ProblemSpec make_hs7() {
  ProblemSpec p;
  p.name = "hs7";
  p.dim_primal = 2;
  p.dim_dual = 1;
  p.objective = [](const Eigen::VectorXd& x) {
    return std::log1p(x(0) * x(0)) - x(1);
  };
  p.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    const double w = 1.0 + x(0) * x(0);
    g(0) = 2.0 * x(0) / w;
    g(1) = -1.0;
    return g;
  };
  p.hessian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    const double w = 1.0 + x(0) * x(0);
    h(0, 0) = 2.0 * (1.0 - x(0) * x(0)) / (w * w);
    return h;
  };
  p.constraints = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd c(1);
    const double w = 1.0 + x(0) * x(0);
    c(0) = w * w + x(1) * x(1) - 4.0;
    return c;
  };
  p.constraint_jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g(1, 2);
    const double w = 1.0 + x(0) * x(0);
    g(0, 0) = 4.0 * x(0) * w;
    g(0, 1) = 2.0 * x(1);
    return g;
  };
  p.constraint_hessian = [](const Eigen::VectorXd& x, int) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = 4.0 + 12.0 * x(0) * x(0);
    h(1, 1) = 2.0;
    return h;
  };
  p.x0 = Eigen::VectorXd(2);
  p.x0 << 2.0, 2.0;
  p.lambda0 = Eigen::VectorXd::Zero(1);
  KnownSolution sol;
  sol.x = Eigen::VectorXd(2);
  sol.x << 0.0, std::sqrt(3.0);
  sol.lambda = Eigen::VectorXd(1);
  sol.lambda << 1.0 / (2.0 * std::sqrt(3.0));
  p.known_solution = sol;
  return p;
}

// Linear objective over the intersection of two spheres; the two sphere
// centers differ in the first coordinate, pinning x1 = 1/2 on the feasible
// set. Stationary points have x2 = x3 = +-sqrt(35/8).
ProblemSpec make_byrdsphr_like() {
  ProblemSpec p;
  p.name = "byrdsphr-like";
  p.dim_primal = 3;
  p.dim_dual = 2;
  p.objective = [](const Eigen::VectorXd& x) { return -x.sum(); };
  p.gradient = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
    return -Eigen::VectorXd::Ones(3);
  };
  p.hessian = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(3, 3); };
  p.constraints = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd c(2);
    c(0) = x.squaredNorm() - 9.0;
    const double s = x(0) - 1.0;
    c(1) = s * s + x(1) * x(1) + x(2) * x(2) - 9.0;
    return c;
  };
  p.constraint_jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g(2, 3);
    g << 2.0 * x(0), 2.0 * x(1), 2.0 * x(2),
         2.0 * (x(0) - 1.0), 2.0 * x(1), 2.0 * x(2);
    return g;
  };
  p.constraint_hessian = [](const Eigen::VectorXd&, int) -> Eigen::MatrixXd {
    return 2.0 * Eigen::MatrixXd::Identity(3, 3);
  };
  p.x0 = Eigen::VectorXd(3);
  p.x0 << 5.0, 0.0001, -0.0001;
  p.lambda0 = Eigen::VectorXd::Zero(2);
  const double s = std::sqrt(35.0 / 8.0);
  KnownSolution sol;
  sol.x = Eigen::VectorXd(3);
  sol.x << 0.5, s, s;
  sol.lambda = Eigen::VectorXd(2);
  sol.lambda << 0.5 * (1.0 + 0.5 / s), 0.5 * (0.5 / s - 1.0);
  p.known_solution = sol;
  return p;
}

struct LogisticData {
  Eigen::MatrixXd features;  // N x d
  Eigen::VectorXd labels;    // in {0, 1}
};

std::shared_ptr<const LogisticData> logistic_data() {
  static const std::shared_ptr<const LogisticData> data = [] {
    const int n = 40;
    const int d = 5;
    auto out = std::make_shared<LogisticData>();
    out->features.resize(n, d);
    out->labels.resize(n);
    RngStream feature_rng(0x51D5E9B2C0FFEE11ull, 0);
    RngStream label_rng(0x51D5E9B2C0FFEE11ull, 1);
    Eigen::VectorXd theta(d);
    theta << 1.0, -1.0, 0.5, 0.0, -0.5;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        out->features(i, j) = feature_rng.next_normal();
      }
      const double prob = sigmoid(out->features.row(i).dot(theta));
      out->labels(i) = label_rng.next_uniform() < prob ? 1.0 : 0.0;
    }
    return out;
  }();
  return data;
}

ProblemSpec make_eq_logistic() {
  ProblemSpec p;
  p.name = "eq_logistic";
  p.dim_primal = 5;
  p.dim_dual = 2;
  auto data = logistic_data();
  Eigen::MatrixXd C(2, 5);
  C << 1.0, 1.0, 1.0, 1.0, 1.0,
       1.0, 0.0, -1.0, 0.0, 1.0;
  Eigen::VectorXd rhs(2);
  rhs << 1.0, 0.2;
  p.objective = [data](const Eigen::VectorXd& x) {
    const Eigen::VectorXd u = data->features * x;
    double total = 0.0;
    for (int i = 0; i < u.size(); ++i) {
      total += softplus(u(i)) - data->labels(i) * u(i);
    }
    return total / static_cast<double>(u.size());
  };
  p.gradient = [data](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd u = data->features * x;
    Eigen::VectorXd w(u.size());
    for (int i = 0; i < u.size(); ++i) {
      w(i) = sigmoid(u(i)) - data->labels(i);
    }
    return data->features.transpose() * w / static_cast<double>(u.size());
  };
  p.hessian = [data](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::VectorXd u = data->features * x;
    Eigen::VectorXd w(u.size());
    for (int i = 0; i < u.size(); ++i) {
      const double s = sigmoid(u(i));
      w(i) = s * (1.0 - s);
    }
    return data->features.transpose() * w.asDiagonal() * data->features /
           static_cast<double>(u.size());
  };
  p.constraints = [C, rhs](const Eigen::VectorXd& x) -> Eigen::VectorXd { return C * x - rhs; };
  p.constraint_jacobian = [C](const Eigen::VectorXd&) { return C; };
  p.constraint_hessian = [](const Eigen::VectorXd&, int) {
    return Eigen::MatrixXd::Zero(5, 5);
  };
  p.x0 = Eigen::VectorXd::Zero(5);
  p.lambda0 = Eigen::VectorXd::Zero(2);
  // Certified by the deterministic reference solver from x0 and polished
  // with extra Newton steps (KKT residual 4.8e-13).
  KnownSolution sol;
  sol.x = Eigen::VectorXd(5);
  sol.x << 1.4786600988784795, -0.82521171536860805, 0.71871439757523448,
      0.18778292021813917, -0.55994570130324484;
  sol.lambda = Eigen::VectorXd(2);
  sol.lambda << 0.0076598104099579439, -0.046089859696301062;
  p.known_solution = sol;
  return p;
}

}  // namespace

Eigen::MatrixXd ProblemSpec::lagrangian_hessian(const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& lambda) const {
  Eigen::MatrixXd h = hessian(x);
  for (int i = 0; i < dim_dual; ++i) {
    h += lambda(i) * constraint_hessian(x, i);
  }
  return h;
}

double eval_kkt_residual(const ProblemSpec& problem, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& lambda) {
  check_dims(problem, x, lambda);
  const Eigen::VectorXd grad_lag =
      problem.gradient(x) + problem.constraint_jacobian(x).transpose() * lambda;
  const Eigen::VectorXd c = problem.constraints(x);
  return std::sqrt(grad_lag.squaredNorm() + c.squaredNorm());
}

Eigen::VectorXd sample_gradient(const ProblemSpec& problem, const Eigen::VectorXd& x,
                                const NoiseModel& noise, RngStream& rng) {
  Eigen::VectorXd g = problem.gradient(x);
  if (noise.sigma2 <= 0.0) {
    return g;
  }
  // L = sigma [I | 1] gives L L^T = sigma2 (I + 11^T) with d+1 variates.
  const double sigma = std::sqrt(noise.sigma2);
  for (int i = 0; i < g.size(); ++i) {
    g(i) += sigma * rng.next_normal();
  }
  g.array() += sigma * rng.next_normal();
  return g;
}

Eigen::MatrixXd sample_lagrangian_hessian(const ProblemSpec& problem,
                                          const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& lambda,
                                          const NoiseModel& noise, RngStream& rng) {
  check_dims(problem, x, lambda);
  Eigen::MatrixXd h = problem.hessian(x);
  if (noise.sigma2 > 0.0) {
    const double sigma = std::sqrt(noise.sigma2);
    // One draw per unordered entry pair keeps the sample exactly symmetric.
    for (int i = 0; i < h.rows(); ++i) {
      for (int j = i; j < h.cols(); ++j) {
        const double z = sigma * rng.next_normal();
        h(i, j) += z;
        if (j != i) h(j, i) += z;
      }
    }
  }
  for (int i = 0; i < problem.dim_dual; ++i) {
    h += lambda(i) * problem.constraint_hessian(x, i);
  }
  return h;
}

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names = {
      "eq_quadratic", "eq_logistic", "hs7", "hs48", "byrdsphr-like"};
  return names;
}

ProblemSpec builtin_problem(const std::string& name) {
  if (name == "eq_quadratic") return make_eq_quadratic();
  if (name == "eq_logistic") return make_eq_logistic();
  if (name == "hs7") return make_hs7();
  if (name == "hs48") return make_hs48();
  if (name == "byrdsphr-like") return make_byrdsphr_like();
  std::string known;
  for (const auto& n : builtin_problem_names()) {
    known += known.empty() ? n : ", " + n;
  }
  throw ConfigError("unknown problem '" + name + "'; available: " + known);
}

}  // namespace stosqp
