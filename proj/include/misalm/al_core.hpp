#pragma once

// Augmented Lagrangian
//
//   L_rho(x, lambda; theta) = f(x;theta) + rho/2 d^2_{-K}(h(x;theta) + lambda/rho)
//                             - ||lambda||^2 / (2 rho)
//
// its lambda-gradient, and the multiplier update.

#include <Eigen/Core>

#include <string>
#include <utility>

#include "misalm/cones.hpp"
#include "misalm/model.hpp"

namespace misalm {

struct AlPoint {
  Vector x;
  Vector lambda;  // kept in K*
  double rho = 1.0;
  Parameter theta;
};

namespace detail {

inline void check_rho(double rho) {
  if (!(rho > 0.0)) throw ConfigError("penalty rho must be positive, got " + std::to_string(rho));
}

inline void check_multiplier(const ParametricProblem& problem, const Vector& lambda) {
  if (lambda.size() != problem.m())
    throw DimensionError("multiplier has length " + std::to_string(lambda.size()) +
                         ", expected " + std::to_string(problem.m()));
}

}  // namespace detail

inline double eval_L(const ParametricProblem& problem, const Vector& x,
                     const Vector& lambda, double rho, const Parameter& theta) {
  detail::check_rho(rho);
  detail::check_multiplier(problem, lambda);
  const Vector h = constraint_value(problem, x, theta);
  const double d = dist_neg(problem.cone, h + lambda / rho);
  return evaluate_f(problem, x, theta) + 0.5 * rho * d * d -
         lambda.squaredNorm() / (2.0 * rho);
}

/// Pi_{K*}(lambda/rho + h) - lambda/rho
inline Vector grad_lambda_L(const ParametricProblem& problem, const Vector& x,
                            const Vector& lambda, double rho, const Parameter& theta) {
  detail::check_rho(rho);
  detail::check_multiplier(problem, lambda);
  const Vector h = constraint_value(problem, x, theta);
  return project_dual(problem.cone, lambda / rho + h) - lambda / rho;
}

/// Second closed form h - Pi_{-K}(lambda/rho + h); agrees with grad_lambda_L
/// by the Moreau decomposition.
inline Vector grad_lambda_L_moreau(const ParametricProblem& problem, const Vector& x,
                                   const Vector& lambda, double rho,
                                   const Parameter& theta) {
  detail::check_rho(rho);
  detail::check_multiplier(problem, lambda);
  const Vector h = constraint_value(problem, x, theta);
  return h - project_neg(problem.cone, lambda / rho + h);
}

/// lambda_{k+1} = Pi_{K*}(lambda_k + rho h(x_{k+1}; theta_k)). The result is
/// projected once more to scrub rounding drift out of K*.
inline Vector dual_update(const ParametricProblem& problem, const Vector& lambda,
                          double rho, const Vector& x, const Parameter& theta) {
  detail::check_rho(rho);
  detail::check_multiplier(problem, lambda);
  const Vector h = constraint_value(problem, x, theta);
  return project_dual(problem.cone, project_dual(problem.cone, lambda + rho * h));
}

/// Snapshot of the inner problem min_{x in X} q(x) + nu_rho(x, lambda; theta)
/// with A(theta), b(theta) evaluated once.
class AlSubproblem {
 public:
  AlSubproblem(const ParametricProblem& problem, Vector lambda, double rho, Parameter theta)
      : problem_(&problem),
        lambda_(std::move(lambda)),
        rho_(rho),
        theta_(std::move(theta)),
        a_(problem.constraint_matrix(theta_)),
        b_(problem.constraint_offset(theta_)) {
    detail::check_rho(rho_);
    detail::check_multiplier(problem, lambda_);
    if (a_.rows() != problem.m() || a_.cols() != problem.n || b_.size() != problem.m())
      throw DimensionError("constraint oracle shape does not match the cone");
  }

  const ParametricProblem& problem() const { return *problem_; }
  const Vector& lambda() const { return lambda_; }
  double rho() const { return rho_; }
  const Parameter& theta() const { return theta_; }
  const Matrix& A() const { return a_; }

  /// nu_rho(x) and its gradient grad p + rho A^T Pi_{K*}(h + lambda/rho).
  ValueGrad nu(const Vector& x) const {
    check_primal(*problem_, x);
    ValueGrad pg = problem_->smooth_value_grad(x, theta_);
    const Vector shifted = a_ * x + b_ + lambda_ / rho_;
    const Vector dual_part = project_dual(problem_->cone, shifted);
    // d_{-K}(shifted) = ||shifted - Pi_{-K}(shifted)|| = ||Pi_{K*}(shifted)||
    const double d2 = dual_part.squaredNorm();
    pg.value += 0.5 * rho_ * d2 - lambda_.squaredNorm() / (2.0 * rho_);
    pg.grad.noalias() += rho_ * (a_.transpose() * dual_part);
    return pg;
  }

  /// L_rho(x) = q(x) + nu_rho(x)
  double value(const Vector& x) const { return problem_->q(x, theta_) + nu(x).value; }

  Vector prox(const Vector& y, const Vector& g, double lipschitz) const {
    return problem_->prox_step(y, g, lipschitz, theta_);
  }

 private:
  const ParametricProblem* problem_;
  Vector lambda_;
  double rho_;
  Parameter theta_;
  Matrix a_;
  Vector b_;
};

}  // namespace misalm
