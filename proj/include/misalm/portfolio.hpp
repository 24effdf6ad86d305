#pragma once

// Markowitz portfolio selection with sector limits,
//
//   min_{x in simplex}  1/2 x^T Sigma x - kappa mu^T x   s.t.  A x <= m,
//
// where theta = vec(Sigma) is the misspecified parameter.

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "misalm/model.hpp"

namespace misalm {

struct PortfolioInstance {
  Eigen::Index n = 0;      // assets
  Eigen::Index s = 0;      // sectors
  Matrix A;                // s x n, 0/1 sector membership
  Vector b;                // sector limits m_j
  Vector mu;               // mean returns
  double risk_tradeoff = 0.1;
  Matrix sigma_true;       // Sigma^o used to draw samples
  std::uint64_t seed = 0;
};

inline Parameter flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unflatten(const Parameter& theta, Eigen::Index n) {
  if (theta.size() != n * n) throw DimensionError("parameter is not an n x n matrix");
  return Eigen::Map<const Matrix>(theta.data(), n, n);
}

inline void validate(const PortfolioInstance& inst) {
  if (inst.n < 1 || inst.s < 1) throw ConfigError("portfolio: n and s must be positive");
  if (inst.A.rows() != inst.s || inst.A.cols() != inst.n)
    throw DimensionError("portfolio: sector matrix must be s x n");
  if (inst.b.size() != inst.s || inst.mu.size() != inst.n)
    throw DimensionError("portfolio: b must have s entries and mu n entries");
  for (Eigen::Index i = 0; i < inst.A.size(); ++i) {
    const double v = inst.A.data()[i];
    if (v != 0.0 && v != 1.0) throw ConfigError("portfolio: sector matrix must be 0/1");
  }
}

/// The problem C(theta) with theta = vec(Sigma). h does not depend on theta,
/// so L_h_theta = 0; |f(x;S1) - f(x;S2)| <= 1/2 ||x||^2 ||S1 - S2||_F gives L_f.
inline ParametricProblem make_portfolio_problem(const PortfolioInstance& inst,
                                                double kappa = 1.0) {
  validate(inst);
  const Eigen::Index n = inst.n;
  const Vector lin = -inst.risk_tradeoff * inst.mu;
  ParametricProblem pr;
  pr.n = n;
  pr.cone = Cone::nonnegative_orthant(inst.s);
  pr.smooth_value_grad = [n, lin](const Vector& x, const Parameter& th) {
    if (th.size() != n * n) throw DimensionError("portfolio: theta must have n*n entries");
    Eigen::Map<const Matrix> sigma(th.data(), n, n);
    Vector sx = sigma * x;
    return ValueGrad{0.5 * x.dot(sx) + lin.dot(x), sx + lin};
  };
  pr.prox_step = [](const Vector& y, const Vector& g, double l, const Parameter&) {
    return simplex_prox(y, g, l);
  };
  pr.linear_minimizer = [](const Vector& g, const Parameter&) {
    return simplex_linear_minimizer(g);
  };
  pr.contains = [](const Vector& x) { return simplex_contains(x); };
  const Matrix a = inst.A;
  const Vector offset = -inst.b;
  pr.constraint_matrix = [a](const Parameter&) { return a; };
  pr.constraint_offset = [offset](const Parameter&) { return offset; };
  pr.smooth_lipschitz = [n](const Parameter& th) {
    return largest_eigenvalue_psd(unflatten(th, n));
  };
  pr.constants.L_p_x = largest_eigenvalue_psd(inst.sigma_true);
  pr.constants.L_h_x = spectral_norm(a);
  pr.constants.L_h_theta = 0.0;
  pr.constants.D_x = 1.0;
  pr.constants.L_f = 0.5 * pr.constants.D_x * pr.constants.D_x;
  pr.constants.kappa = kappa;
  return pr;
}

}  // namespace misalm
