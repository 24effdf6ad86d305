#pragma once

// The parametric conic program
//
//   min_{x in X}  f(x; theta) = q(x; theta) + p(x; theta)
//   s.t.          h(x; theta) = A(theta) x + b(theta)  in  -K
//
// described by oracles, plus the constants the rate bounds consume.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "misalm/cones.hpp"
#include "misalm/errors.hpp"
#include "misalm/linalg.hpp"

namespace misalm {

/// The misspecified parameter theta, flattened (matrices column-major).
using Parameter = Vector;

struct ValueGrad {
  double value = 0.0;
  Vector grad;
};

struct ProblemConstants {
  double L_p_x = 0.0;      // Lipschitz constant of grad_x p, uniform in theta
  double L_h_x = 0.0;      // max_theta ||A(theta)||
  double L_h_theta = 0.0;  // Lipschitz constant of h in theta over X
  double L_f = 0.0;        // Lipschitz constant of f in theta over X
  double D_x = 1.0;        // max_{x in X} ||x||
  double kappa = 1.0;      // pseudo-Lipschitz constant; only scales reported bounds
};

struct ParametricProblem {
  Eigen::Index n = 0;  // primal dimension
  Cone cone = Cone::nonnegative_orthant(1);

  /// (x, theta) -> (p, grad_x p)
  std::function<ValueGrad(const Vector&, const Parameter&)> smooth_value_grad;
  /// (x, theta) -> q. Defaults to zero when unset.
  std::function<double(const Vector&, const Parameter&)> nonsmooth_value;
  /// (y, g, L, theta) -> argmin_{z in X} q(z) + <g, z - y> + L/2 ||z - y||^2
  std::function<Vector(const Vector&, const Vector&, double, const Parameter&)> prox_step;
  std::function<Matrix(const Parameter&)> constraint_matrix;
  std::function<Vector(const Parameter&)> constraint_offset;

  ProblemConstants constants;

  /// Optional per-theta Lipschitz constant of grad_x p; falls back to
  /// constants.L_p_x.
  std::function<double(const Parameter&)> smooth_lipschitz;
  /// Optional (g, theta) -> argmin_{s in X} <g, s> + q(s; theta). Enables
  /// Frank-Wolfe gap certificates for inner solves.
  std::function<Vector(const Vector&, const Parameter&)> linear_minimizer;
  /// Optional membership oracle for X.
  std::function<bool(const Vector&)> contains;

  Eigen::Index m() const { return cone.dim(); }

  double q(const Vector& x, const Parameter& theta) const {
    return nonsmooth_value ? nonsmooth_value(x, theta) : 0.0;
  }

  double lipschitz_p(const Parameter& theta) const {
    return smooth_lipschitz ? smooth_lipschitz(theta) : constants.L_p_x;
  }
};

/// Throws if oracles are missing or shapes disagree at theta.
inline void validate(const ParametricProblem& problem, const Parameter& theta) {
  if (!problem.smooth_value_grad || !problem.prox_step ||
      !problem.constraint_matrix || !problem.constraint_offset)
    throw ConfigError("ParametricProblem: required oracle missing");
  const Matrix a = problem.constraint_matrix(theta);
  const Vector b = problem.constraint_offset(theta);
  if (a.rows() != problem.m() || a.cols() != problem.n || b.size() != problem.m())
    throw DimensionError("ParametricProblem: A(theta) is " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + ", b(theta) has " +
                         std::to_string(b.size()) + " rows; expected m=" +
                         std::to_string(problem.m()) + ", n=" + std::to_string(problem.n));
  const auto& c = problem.constants;
  for (double v : {c.L_p_x, c.L_h_x, c.L_h_theta, c.L_f, c.D_x, c.kappa})
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError("ParametricProblem: constants must be finite and nonnegative");
}

inline void check_primal(const ParametricProblem& problem, const Vector& x) {
  if (x.size() != problem.n)
    throw DimensionError("expected primal vector of length " + std::to_string(problem.n) +
                         ", got " + std::to_string(x.size()));
}

/// f(x; theta) = q + p
inline double evaluate_f(const ParametricProblem& problem, const Vector& x,
                         const Parameter& theta) {
  check_primal(problem, x);
  return problem.q(x, theta) + problem.smooth_value_grad(x, theta).value;
}

/// h(x; theta) = A(theta) x + b(theta)
inline Vector constraint_value(const ParametricProblem& problem, const Vector& x,
                               const Parameter& theta) {
  check_primal(problem, x);
  const Matrix a = problem.constraint_matrix(theta);
  const Vector b = problem.constraint_offset(theta);
  if (a.rows() != problem.m() || a.cols() != problem.n || b.size() != problem.m())
    throw DimensionError("constraint oracle shape does not match the cone");
  return a * x + b;
}

/// d_{-K}(h(x; theta))
inline double infeasibility(const ParametricProblem& problem, const Vector& x,
                            const Parameter& theta) {
  return dist_neg(problem.cone, constraint_value(problem, x, theta));
}

/// Prox step for q = 0 over the unit simplex: projection of y - g/L.
inline Vector simplex_prox(const Vector& y, const Vector& g, double lipschitz) {
  if (!(lipschitz > 0.0)) throw ConfigError("simplex_prox: L must be positive");
  if (y.size() != g.size()) throw DimensionError("simplex_prox: y and g differ in length");
  return project_simplex(y - g / lipschitz);
}

/// Vertex of the unit simplex minimizing <g, s>.
inline Vector simplex_linear_minimizer(const Vector& g) {
  Eigen::Index best = 0;
  g.minCoeff(&best);
  Vector s = Vector::Zero(g.size());
  s(best) = 1.0;
  return s;
}

inline bool simplex_contains(const Vector& x, double tol = 1e-9) {
  return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
}

/// Quadratic family p(x; theta) = 1/2 x^T Q(theta) x + c(theta)^T x over the
/// unit simplex, with theta-independent linear constraints A x + b in -K.
/// Used for small test problems; the portfolio builder is a special case.
struct QuadraticSimplexSpec {
  std::function<Matrix(const Parameter&)> hessian;
  std::function<Vector(const Parameter&)> linear;
  Matrix A;
  Vector b;
  Cone cone = Cone::nonnegative_orthant(1);
  double L_f = 0.0;
  double kappa = 1.0;
  double L_p_x = 0.0;
};

inline ParametricProblem make_quadratic_simplex_problem(QuadraticSimplexSpec spec) {
  ParametricProblem pr;
  pr.n = spec.A.cols();
  pr.cone = spec.cone;
  auto hess = spec.hessian;
  auto lin = spec.linear;
  pr.smooth_value_grad = [hess, lin](const Vector& x, const Parameter& th) {
    const Matrix q = hess(th);
    const Vector c = lin(th);
    Vector qx = q * x;
    return ValueGrad{0.5 * x.dot(qx) + c.dot(x), qx + c};
  };
  pr.prox_step = [](const Vector& y, const Vector& g, double l, const Parameter&) {
    return simplex_prox(y, g, l);
  };
  pr.linear_minimizer = [](const Vector& g, const Parameter&) {
    return simplex_linear_minimizer(g);
  };
  pr.contains = [](const Vector& x) { return simplex_contains(x); };
  const Matrix a = spec.A;
  const Vector b = spec.b;
  pr.constraint_matrix = [a](const Parameter&) { return a; };
  pr.constraint_offset = [b](const Parameter&) { return b; };
  pr.smooth_lipschitz = [hess](const Parameter& th) {
    return largest_eigenvalue_psd(hess(th));
  };
  pr.constants.L_p_x = spec.L_p_x;
  pr.constants.L_h_x = spectral_norm(a);
  pr.constants.L_h_theta = 0.0;
  pr.constants.L_f = spec.L_f;
  pr.constants.D_x = 1.0;
  pr.constants.kappa = spec.kappa;
  return pr;
}

}  // namespace misalm
