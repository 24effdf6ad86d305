#pragma once

// Accelerated proximal gradient (FISTA) on the inner problem
//
//   min_{x in X}  q(x; theta_k) + nu_{rho_k}(x, lambda_k; theta_k)
//
// run either for the a-priori budget T_k = ceil(sqrt(2 L / alpha) D_x) or,
// in certified mode, until a gap certificate drops below alpha.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "misalm/al_core.hpp"
#include "misalm/errors.hpp"
#include "misalm/model.hpp"

namespace misalm {

enum class ApgMode { Budget, Certified };

struct ApgConfig {
  ApgMode mode = ApgMode::Budget;
  long max_iterations = 50'000'000;
  double alpha = 1e-3;  // target inexactness
};

struct ApgResult {
  Vector x;
  long iterations = 0;
  long budget = 0;  // T_k
  /// alpha in budget mode (guaranteed by the FISTA rate); in certified mode
  /// the certificate value that stopped the loop, or alpha if the budget ran out.
  double certified_gap_bound = 0.0;
};

/// Upper bound on L_rho(z) - g_rho at a candidate z.
using GapCertificate = std::function<double(const Vector&)>;

/// L_{nu,x}(rho, theta) = L_{p,x}(theta) + rho ||A(theta)||^2
inline double lipschitz_nu(const ParametricProblem& problem, double rho,
                           const Parameter& theta) {
  if (rho < 0.0) throw ConfigError("lipschitz_nu: rho must be nonnegative");
  const double a_norm = spectral_norm(problem.constraint_matrix(theta));
  return problem.lipschitz_p(theta) + rho * a_norm * a_norm;
}

/// grad_x nu = grad_x p + rho A^T Pi_{K*}(h + lambda/rho)
inline Vector grad_nu(const ParametricProblem& problem, const Vector& x,
                      const Vector& lambda, double rho, const Parameter& theta) {
  return AlSubproblem(problem, lambda, rho, theta).nu(x).grad;
}

/// m_{t+1} = (1 + sqrt(1 + 4 m_t^2)) / 2
inline double fista_momentum_next(double m) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * m * m)); }

/// ceil(sqrt(2 L / alpha) * D_x), at least 1.
inline long apg_budget(double lipschitz, double alpha, double diameter) {
  if (!(alpha > 0.0)) throw ConfigError("apg_budget: alpha must be positive");
  const double t = std::ceil(std::sqrt(2.0 * lipschitz / alpha) * diameter);
  if (!std::isfinite(t) || t > static_cast<double>(std::numeric_limits<long>::max() / 2))
    return std::numeric_limits<long>::max() / 2;
  return std::max(1L, static_cast<long>(t));
}

struct FistaRun {
  Vector z;
  long iterations = 0;
  bool stopped_early = false;
};

/// Plain FISTA without restart: z_t = prox(y_t, grad(y_t), L), momentum
/// m_{t+1} = (1 + sqrt(1 + 4 m_t^2))/2, extrapolation with (m_t - 1)/m_{t+1}.
/// `stop(t, z_t)` is queried after every step.
template <class GradFn, class ProxFn, class StopFn>
FistaRun fista(const Vector& x0, double lipschitz, long iterations, GradFn&& grad,
               ProxFn&& prox, StopFn&& stop) {
  Vector z_prev = x0;
  Vector y = x0;
  Vector z = x0;
  double m = 1.0;
  for (long t = 1; t <= iterations; ++t) {
    z = prox(y, grad(y), lipschitz);
    if (stop(t, z)) return {z, t, true};
    const double m_next = fista_momentum_next(m);
    y = z + ((m - 1.0) / m_next) * (z - z_prev);
    z_prev = z;
    m = m_next;
  }
  return {z, iterations, false};
}

/// Frank-Wolfe gap <g, z - s> + q(z) - q(s), s = argmin_X <g, s> + q(s), with
/// g = grad nu(z). Requires problem.linear_minimizer.
inline GapCertificate frank_wolfe_certificate(const AlSubproblem& sub) {
  if (!sub.problem().linear_minimizer)
    throw ConfigError("frank_wolfe_certificate needs a linear minimization oracle");
  return [&sub](const Vector& z) {
    const Vector g = sub.nu(z).grad;
    const Vector s = sub.problem().linear_minimizer(g, sub.theta());
    return g.dot(z - s) + sub.problem().q(z, sub.theta()) - sub.problem().q(s, sub.theta());
  };
}

/// Gap measured against a lower bound on g_rho from a reference solve.
inline GapCertificate reference_certificate(const AlSubproblem& sub, double g_lower) {
  return [&sub, g_lower](const Vector& z) { return sub.value(z) - g_lower; };
}

inline ApgResult apg_solve(const AlSubproblem& sub, const Vector& x_init,
                           const ApgConfig& config, const GapCertificate& certificate = {},
                           long epoch = 0) {
  if (config.max_iterations < 1) throw ConfigError("ApgConfig: max_iterations must be >= 1");
  if (!(config.alpha > 0.0)) throw ConfigError("ApgConfig: alpha must be positive");
  if (config.mode == ApgMode::Certified && !certificate)
    throw ConfigError("certified APG mode needs a gap certificate");
  check_primal(sub.problem(), x_init);

  const double lip = lipschitz_nu(sub.problem(), sub.rho(), sub.theta());
  const long budget = apg_budget(lip, config.alpha, sub.problem().constants.D_x);
  if (budget > config.max_iterations) throw BudgetExceeded(epoch, budget, config.max_iterations);

  double last_certificate = config.alpha;
  auto grad = [&sub](const Vector& y) { return sub.nu(y).grad; };
  auto prox = [&sub](const Vector& y, const Vector& g, double l) { return sub.prox(y, g, l); };
  FistaRun run;
  if (config.mode == ApgMode::Budget) {
    run = fista(x_init, lip, budget, grad, prox, [](long, const Vector&) { return false; });
  } else {
    run = fista(x_init, lip, budget, grad, prox, [&](long, const Vector& z) {
      last_certificate = certificate(z);
      return last_certificate <= config.alpha;
    });
  }
  ApgResult out;
  out.x = std::move(run.z);
  out.iterations = run.iterations;
  out.budget = budget;
  out.certified_gap_bound = run.stopped_early ? last_certificate : config.alpha;
  return out;
}

inline ApgResult apg_solve(const ParametricProblem& problem, const Vector& x_init,
                           const Vector& lambda, double rho, const Parameter& theta,
                           const ApgConfig& config, const GapCertificate& certificate = {},
                           long epoch = 0) {
  const AlSubproblem sub(problem, lambda, rho, theta);
  return apg_solve(sub, x_init, config, certificate, epoch);
}

struct AccurateSolve {
  Vector x;
  double value = 0.0;  // L_rho(x)
  double gap = 0.0;    // certified: value - g_rho <= gap
  long iterations = 0;
};

/// High-accuracy inner solve used as an oracle (g_rho proxies, certified mode,
/// reference gaps): FISTA with function-value restart, stopped by the
/// Frank-Wolfe gap.
inline AccurateSolve solve_subproblem_accurately(const AlSubproblem& sub, const Vector& x0,
                                                 double tol = 1e-11,
                                                 long max_iterations = 2'000'000) {
  const GapCertificate cert = frank_wolfe_certificate(sub);
  const double lip = lipschitz_nu(sub.problem(), sub.rho(), sub.theta()) * (1.0 + 1e-9);
  Vector z_prev = x0;
  Vector y = x0;
  Vector z = x0;
  double m = 1.0;
  double f_prev = sub.value(x0);
  AccurateSolve best{x0, f_prev, cert(x0), 0};
  for (long t = 1; t <= max_iterations; ++t) {
    z = sub.prox(y, sub.nu(y).grad, lip);
    const double fz = sub.value(z);
    if (t % 5 == 0 || t < 5) {
      const double gap = cert(z);
      if (gap < best.gap) best = {z, fz, gap, t};
      if (gap <= tol) return {z, fz, gap, t};
    }
    if (fz > f_prev) {  // restart momentum
      m = 1.0;
      y = z;
      z_prev = z;
      f_prev = fz;
      continue;
    }
    const double m_next = fista_momentum_next(m);
    y = z + ((m - 1.0) / m_next) * (z - z_prev);
    z_prev = z;
    m = m_next;
    f_prev = fz;
  }
  best.iterations = max_iterations;
  return best;
}

}  // namespace misalm
