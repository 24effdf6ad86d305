#pragma once

// Closed-form rate constants for the misspecified inexact augmented
// Lagrangian scheme, so empirical traces can be overlaid against theory.
//
// Constant penalty rho, alpha_k = alpha0/(k+1)^{2(1+c)}:
//   C_lambda = sqrt(2 rho) S + rho kappa e0/(1-tau) + ||lambda0 - lambda*||,
//              S = sum_k sqrt(alpha_k), e0 = ||theta0 - theta*||
//   B_g      = ||lambda0 - lambda*||^2/(2 rho) + C_lambda (sqrt(2/rho) S + kappa e0/(1-tau))
//   V(k)     = C1/sqrt(k) + C2/k,
//              C1 = sqrt(2 B_g/rho + (C_lambda/rho)^2),
//              C2 = sqrt(2/rho) S + (L_h + kappa) e0/(1-tau)
//   U        = sum alpha_k + ||lambda0||^2/2 + rho/2 L_h^2 e0^2/(1-tau^2)
//              + (Cbar L_h + 2 L_f) e0/(1-tau),   Cbar = C_lambda + ||lambda*||
// with dual gap <= B_g/k, infeasibility <= V(k) and
// -(rho/2) V(k)^2 - ||lambda*|| V(k) <= f(xbar_k) - f* <= U/k.
//
// Geometric penalty rho_k = rho0 beta^k, delta = beta tau < 1:
//   C'_lambda = sum sqrt(2 alpha_k rho_k) + rho0 kappa e0/(1 - delta) + ||lambda0 - lambda*||
//   B_k       = (2 C' + ||lambda*||)^2/rho0 + rho0 (L_h e0 delta^k + L_f/(rho0 L_h))^2
//               + alpha0/(k+1)^{2(1+c)}
// with |f(x_{k+1}) - f*| <= B_k/beta^k and
// d_{-K}(h(x_{k+1})) <= (2 C'/rho0 + L_h e0 delta^k)/beta^k.
//
// Here L_h is the Lipschitz constant of h in theta. kappa (the pseudo-Lipschitz
// constant of the dual) is user supplied: it changes how tight the curves are,
// never how the algorithm runs.

#include <cmath>
#include <limits>
#include <string>

#include "misalm/errors.hpp"
#include "misalm/schedules.hpp"

namespace misalm {

struct BoundInputs {
  // Constant regime uses rho; geometric regime uses rho0 and beta.
  double rho = 1.0;
  double rho0 = 1.0;
  double beta = 1.0;
  double alpha0 = 0.0;
  double c = 1.0;
  double tau = 0.5;
  double theta0_err = 0.0;   // ||theta0 - theta*||
  double lambda0_err = 0.0;  // ||lambda0 - lambda*||
  double lambda0_norm = 0.0;
  double lambda_star_norm = 0.0;
  double kappa = 1.0;
  double L_f = 0.0;
  double L_h_theta = 0.0;
  double L_h_x = 0.0;
};

namespace detail {

inline void check_common(const BoundInputs& in) {
  for (double v : {in.alpha0, in.theta0_err, in.lambda0_err, in.lambda0_norm, in.lambda_star_norm,
                   in.kappa, in.L_f, in.L_h_theta, in.L_h_x})
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("bound inputs must be finite and nonnegative");
  if (!(in.tau > 0.0 && in.tau < 1.0)) throw ConfigError("bound inputs: tau must lie in (0, 1)");
  if (!(in.c > 0.0)) throw ConfigError("bound inputs: alpha series diverges unless c > 0");
}

inline void check_constant(const BoundInputs& in) {
  check_common(in);
  if (!(in.rho > 0.0)) throw ConfigError("bound inputs: rho must be positive");
}

inline void check_geometric(const BoundInputs& in) {
  check_common(in);
  if (!(in.rho0 > 0.0)) throw ConfigError("bound inputs: rho0 must be positive");
  if (!(in.beta > 1.0)) throw ConfigError("bound inputs: beta must exceed 1");
  if (!(in.beta * in.tau < 1.0)) throw ConfigError("bound inputs: beta * tau must be below 1");
}

inline InexactnessSchedule constant_alpha(const BoundInputs& in) {
  return InexactnessSchedule{in.alpha0, in.c, false, 1.0};
}

}  // namespace detail

/// sum_k sqrt(alpha_k) for the constant regime.
inline double sum_sqrt_alpha(const BoundInputs& in) {
  detail::check_constant(in);
  return detail::constant_alpha(in).sum_sqrt_alpha();
}

inline double c_lambda(const BoundInputs& in) {
  detail::check_constant(in);
  return std::sqrt(2.0 * in.rho) * sum_sqrt_alpha(in) +
         in.rho * in.kappa * in.theta0_err / (1.0 - in.tau) + in.lambda0_err;
}

inline double b_g(const BoundInputs& in) {
  const double cl = c_lambda(in);
  return in.lambda0_err * in.lambda0_err / (2.0 * in.rho) +
         cl * (std::sqrt(2.0 / in.rho) * sum_sqrt_alpha(in) + in.kappa * in.theta0_err / (1.0 - in.tau));
}

inline double c1_const(const BoundInputs& in) {
  const double cl = c_lambda(in);
  return std::sqrt(2.0 * b_g(in) / in.rho + (cl / in.rho) * (cl / in.rho));
}

inline double c2_const(const BoundInputs& in) {
  detail::check_constant(in);
  return std::sqrt(2.0 / in.rho) * sum_sqrt_alpha(in) +
         (in.L_h_theta + in.kappa) * in.theta0_err / (1.0 - in.tau);
}

/// V(k) = C1/sqrt(k) + C2/k, k >= 1.
inline double v_of_k(const BoundInputs& in, long k) {
  if (k < 1) throw ConfigError("v_of_k requires k >= 1");
  const double kk = static_cast<double>(k);
  return c1_const(in) / std::sqrt(kk) + c2_const(in) / kk;
}

inline double u_const(const BoundInputs& in) {
  detail::check_constant(in);
  const double e0 = in.theta0_err;
  const double cbar = c_lambda(in) + in.lambda_star_norm;
  return detail::constant_alpha(in).sum_alpha() + 0.5 * in.lambda0_norm * in.lambda0_norm +
         0.5 * in.rho * in.L_h_theta * in.L_h_theta * e0 * e0 / (1.0 - in.tau * in.tau) +
         (cbar * in.L_h_theta + 2.0 * in.L_f) * e0 / (1.0 - in.tau);
}

/// f* - g_rho(lambdabar_k) <= B_g / k
inline double dual_gap_bound(const BoundInputs& in, long k) {
  if (k < 1) throw ConfigError("dual_gap_bound requires k >= 1");
  return b_g(in) / static_cast<double>(k);
}

/// f(xbar_k) - f* <= U / k
inline double subopt_upper_bound(const BoundInputs& in, long k) {
  if (k < 1) throw ConfigError("subopt_upper_bound requires k >= 1");
  return u_const(in) / static_cast<double>(k);
}

/// f(xbar_k) - f* >= -(rho/2) V(k)^2 - ||lambda*|| V(k)
inline double subopt_lower_bound(const BoundInputs& in, long k) {
  const double v = v_of_k(in, k);
  return -0.5 * in.rho * v * v - in.lambda_star_norm * v;
}

inline double c_lambda_prime(const BoundInputs& in) {
  detail::check_geometric(in);
  const double sum_sqrt_2ar =
      in.alpha0 == 0.0 ? 0.0 : std::sqrt(2.0 * in.alpha0 * in.rho0) * zeta_sum(1.0 + in.c);
  return sum_sqrt_2ar + in.rho0 * in.kappa * in.theta0_err / (1.0 - in.beta * in.tau) + in.lambda0_err;
}

struct GeometricBound {
  double b_k = 0.0;
  double subopt = 0.0;  // B_k / beta^k, bounds |f(x_{k+1}) - f*|
  double infeas = 0.0;  // bounds d_{-K}(h(x_{k+1}))
};

/// Bounds for the iterate x_{k+1}, k >= 0. When L_h_theta = 0 the square in
/// B_k is left expanded, since the completed form divides by L_h_theta:
///   rho0 L_h^2 e0^2 delta^{2k} + 2 L_f e0 delta^k.
inline GeometricBound b_k(const BoundInputs& in, long k) {
  if (k < 0) throw ConfigError("b_k requires k >= 0");
  const double cp = c_lambda_prime(in);
  const double delta = in.beta * in.tau;
  const double dk = std::pow(delta, static_cast<double>(k));
  const double bk_scale = std::pow(in.beta, static_cast<double>(k));
  const double lead = (2.0 * cp + in.lambda_star_norm) * (2.0 * cp + in.lambda_star_norm) / in.rho0;
  double mis;
  if (in.L_h_theta > 0.0) {
    const double inner = in.L_h_theta * in.theta0_err * dk + in.L_f / (in.rho0 * in.L_h_theta);
    mis = in.rho0 * inner * inner;
  } else {
    mis = 2.0 * in.L_f * in.theta0_err * dk;
  }
  const double tail = in.alpha0 / std::pow(static_cast<double>(k + 1), 2.0 * (1.0 + in.c));
  GeometricBound out;
  out.b_k = lead + mis + tail;
  out.subopt = out.b_k / bk_scale;
  out.infeas = (2.0 * cp / in.rho0 + in.L_h_theta * in.theta0_err * dk) / bk_scale;
  return out;
}

}  // namespace misalm
