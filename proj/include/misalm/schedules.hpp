#pragma once

// Penalty and inexactness schedules for the outer augmented Lagrangian loop.
//
//   constant:    rho_k = rho,          alpha_k = alpha0 / (k+1)^{2(1+c)}
//   increasing:  rho_k = rho0 beta^k,  alpha_k = alpha0 / ((k+1)^{2(1+c)} beta^k)

#include <cmath>
#include <string>
#include <utility>

#include "misalm/errors.hpp"
#include "misalm/series.hpp"

namespace misalm {

struct PenaltySchedule {
  enum class Kind { Constant, Geometric };
  Kind kind = Kind::Constant;
  double rho0 = 1.0;
  double beta = 1.0;  // Geometric only, > 1

  static PenaltySchedule constant(double rho) {
    if (!(rho > 0.0)) throw ConfigError("constant penalty must be positive");
    return {Kind::Constant, rho, 1.0};
  }
  static PenaltySchedule geometric(double rho0, double beta) {
    if (!(rho0 > 0.0)) throw ConfigError("rho0 must be positive");
    if (!(beta > 1.0)) throw ConfigError("geometric penalty requires beta > 1");
    return {Kind::Geometric, rho0, beta};
  }

  bool increasing() const { return kind == Kind::Geometric; }
  double rho(long k) const {
    return kind == Kind::Constant ? rho0 : rho0 * std::pow(beta, static_cast<double>(k));
  }
};

struct InexactnessSchedule {
  double alpha0 = 1.0;
  double c = 1.0;
  bool geometric_decay = false;
  double beta = 1.0;  // divisor base when geometric_decay

  double alpha(long k) const {
    double a = alpha0 / std::pow(static_cast<double>(k + 1), 2.0 * (1.0 + c));
    if (geometric_decay) a /= std::pow(beta, static_cast<double>(k));
    return a;
  }

  /// sum_k sqrt(alpha_k)
  double sum_sqrt_alpha() const {
    if (alpha0 == 0.0) return 0.0;
    return std::sqrt(alpha0) * power_series_sum(1.0 + c, geometric_decay ? 1.0 / std::sqrt(beta) : 1.0);
  }
  /// sum_k alpha_k
  double sum_alpha() const {
    if (alpha0 == 0.0) return 0.0;
    return alpha0 * power_series_sum(2.0 * (1.0 + c), geometric_decay ? 1.0 / beta : 1.0);
  }
};

/// Validates alpha0 >= 0 and c > 0 (the latter makes sum sqrt(alpha_k) finite).
inline void validate(const InexactnessSchedule& s) {
  if (!(s.alpha0 >= 0.0)) throw ConfigError("alpha0 must be nonnegative");
  if (!(s.c > 0.0)) throw ConfigError("c must be positive; the inexactness series diverges otherwise");
  if (s.geometric_decay && !(s.beta > 1.0)) throw ConfigError("geometric decay requires beta > 1");
}

/// rho = rho_o / epsilon when theta* is known, rho = rho_o under learning;
/// alpha0 solves sqrt(alpha0) * sum_k (k+1)^{-(1+c)} = 1 / sqrt(2 rho).
inline std::pair<PenaltySchedule, InexactnessSchedule> make_constant_schedule(
    double epsilon, double rho_o, bool learner_known, double c = 1.0) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(rho_o > 0.0)) throw ConfigError("rho_o must be positive");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  const double rho = learner_known ? rho_o / epsilon : rho_o;
  const double series = zeta_sum(1.0 + c);
  const double sqrt_alpha0 = 1.0 / (std::sqrt(2.0 * rho) * series);
  InexactnessSchedule in{sqrt_alpha0 * sqrt_alpha0, c, false, 1.0};
  return {PenaltySchedule::constant(rho), in};
}

/// rho_k = rho0 beta^k, alpha_k = alpha0 / ((k+1)^{2(1+c)} beta^k). Requires
/// beta > 1, tau in (0,1) and beta * tau < 1, so sum sqrt(alpha_k rho_k) =
/// sqrt(alpha0 rho0) sum (k+1)^{-(1+c)} is finite.
inline std::pair<PenaltySchedule, InexactnessSchedule> make_increasing_schedule(
    double rho0, double beta, double alpha0, double c, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("learning rate tau must lie in (0, 1)");
  if (!(beta > 1.0)) throw ConfigError("increasing penalty requires beta > 1");
  if (!(beta * tau < 1.0))
    throw ConfigError("increasing penalty requires beta * tau < 1; got beta * tau = " +
                      std::to_string(beta * tau));
  if (!(alpha0 > 0.0)) throw ConfigError("alpha0 must be positive");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  return {PenaltySchedule::geometric(rho0, beta), InexactnessSchedule{alpha0, c, true, beta}};
}

}  // namespace misalm
