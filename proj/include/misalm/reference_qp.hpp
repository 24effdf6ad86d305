#pragma once

// Reference solutions for quadratic instances. A dense Mehrotra
// predictor-corrector interior-point method solves
//
//   min 1/2 x^T Q x + c^T x   s.t.  G x <= h,  E x = e
//
// independently of the augmented Lagrangian path, and the result is
// certified by its KKT residual.

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "misalm/errors.hpp"
#include "misalm/model.hpp"

namespace misalm {

struct QpProblem {
  Matrix Q;
  Vector c;
  Matrix G;
  Vector h;
  Matrix E;
  Vector e;
};

struct QpSolution {
  Vector x;
  Vector z;  // multipliers of G x <= h
  Vector y;  // multipliers of E x = e
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// max of stationarity, primal feasibility, dual feasibility and
/// complementarity violations (infinity norms).
inline double qp_kkt_residual(const QpProblem& qp, const Vector& x, const Vector& z,
                              const Vector& y) {
  double r = (qp.Q * x + qp.c + qp.G.transpose() * z + qp.E.transpose() * y)
                 .lpNorm<Eigen::Infinity>();
  const Vector slack = qp.h - qp.G * x;
  if (slack.size() > 0) {
    r = std::max(r, (-slack).cwiseMax(0.0).maxCoeff());
    r = std::max(r, (-z).cwiseMax(0.0).maxCoeff());
    r = std::max(r, (z.array() * slack.array()).abs().maxCoeff());
  }
  if (qp.e.size() > 0) r = std::max(r, (qp.E * x - qp.e).lpNorm<Eigen::Infinity>());
  return r;
}

inline QpSolution solve_qp_ipm(const QpProblem& qp, double tol = 1e-13, int max_iterations = 200) {
  const Eigen::Index n = qp.Q.rows();
  const Eigen::Index mi = qp.G.rows();
  const Eigen::Index me = qp.E.rows();
  if (qp.Q.cols() != n || qp.c.size() != n || qp.G.cols() != n || qp.h.size() != mi ||
      (me > 0 && qp.E.cols() != n) || qp.e.size() != me)
    throw DimensionError("solve_qp_ipm: inconsistent QP shapes");

  Vector x = Vector::Zero(n);
  Vector s = (qp.h - qp.G * x).cwiseMax(1.0);
  Vector z = Vector::Ones(mi);
  Vector y = Vector::Zero(me);

  auto max_step = [](const Vector& v, const Vector& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
  };

  const double scale = 1.0 + std::max({qp.Q.lpNorm<Eigen::Infinity>(), qp.c.lpNorm<Eigen::Infinity>(),
                                       qp.h.size() ? qp.h.lpNorm<Eigen::Infinity>() : 0.0});
  Matrix kkt(n + me, n + me);
  // The loop keeps the iterate with the smallest KKT measure, because
  // iterating past machine precision eventually breaks down.
  QpSolution best;
  double best_measure = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Vector r_d = qp.Q * x + qp.c + qp.G.transpose() * z + qp.E.transpose() * y;
    const Vector r_p = qp.G * x + s - qp.h;
    const Vector r_e = qp.E * x - qp.e;
    const double mu = mi > 0 ? s.dot(z) / static_cast<double>(mi) : 0.0;
    const double res = std::max({r_d.lpNorm<Eigen::Infinity>(),
                                 mi ? r_p.lpNorm<Eigen::Infinity>() : 0.0,
                                 me ? r_e.lpNorm<Eigen::Infinity>() : 0.0});
    const double measure = std::max(res, mu);
    if (!std::isfinite(measure)) break;
    if (measure < best_measure) {
      best_measure = measure;
      best.x = x;
      best.z = z;
      best.y = y;
      best.iterations = it;
    }
    if (res <= tol * scale && mu <= tol * scale) break;

    const Vector w = z.cwiseQuotient(s);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = qp.Q + qp.G.transpose() * w.asDiagonal() * qp.G;
    if (me > 0) {
      kkt.topRightCorner(n, me) = qp.E.transpose();
      kkt.bottomLeftCorner(me, n) = qp.E;
    }
    const Eigen::PartialPivLU<Matrix> lu(kkt);

    auto solve_direction = [&](const Vector& r_c, Vector& dx, Vector& ds, Vector& dz, Vector& dy) {
      Vector rhs(n + me);
      rhs.head(n) = -r_d - qp.G.transpose() * ((z.cwiseProduct(r_p) - r_c).cwiseQuotient(s));
      if (me > 0) rhs.tail(me) = -r_e;
      const Vector sol = lu.solve(rhs);
      dx = sol.head(n);
      dy = sol.tail(me);
      ds = -r_p - qp.G * dx;
      dz = (-r_c - z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    Vector dx, ds, dz, dy;
    solve_direction(s.cwiseProduct(z), dx, ds, dz, dy);
    const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff =
        mi > 0 ? (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(mi) : 0.0;
    const double sigma = mu > 0.0 ? std::pow(mu_aff / mu, 3) : 0.0;
    const Vector r_c = s.cwiseProduct(z) + ds.cwiseProduct(dz) -
                       Vector::Constant(mi, sigma * mu);
    solve_direction(r_c, dx, ds, dz, dy);
    const double a = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(z, dz)));
    if (!(a > 1e-14) || !dx.allFinite() || !dz.allFinite()) break;
    x += a * dx;
    s += a * ds;
    z += a * dz;
    y += a * dy;
  }
  if (!std::isfinite(best_measure)) throw ConvergenceError("solve_qp_ipm: no finite iterate");
  best.objective = 0.5 * best.x.dot(qp.Q * best.x) + qp.c.dot(best.x);
  best.kkt_residual = qp_kkt_residual(qp, best.x, best.z, best.y);
  return best;
}

struct ReferenceSolution {
  Vector x;
  Vector lambda;  // multipliers of h(x; theta) <= 0
  double f_star = 0.0;
  double kkt_residual = 0.0;
};

/// Reference solve of C(theta) for a problem whose smooth part is quadratic,
/// whose nonsmooth part is zero, whose X is the unit simplex and whose cone is
/// the nonnegative orthant. Q and c are recovered by probing the gradient
/// oracle, and the quadratic model is checked at a random point.
inline ReferenceSolution reference_solve(const ParametricProblem& problem,
                                         const Parameter& theta,
                                         double kkt_tolerance = 1e-9) {
  if (problem.cone.kind() != Cone::Kind::NonnegativeOrthant)
    throw ConfigError("reference_solve supports the nonnegative orthant only");
  const Eigen::Index n = problem.n;
  const Vector zero = Vector::Zero(n);
  const ValueGrad at_zero = problem.smooth_value_grad(zero, theta);
  QpProblem qp;
  qp.c = at_zero.grad;
  qp.Q.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector ei = Vector::Zero(n);
    ei(i) = 1.0;
    qp.Q.col(i) = problem.smooth_value_grad(ei, theta).grad - qp.c;
  }
  qp.Q = 0.5 * (qp.Q + qp.Q.transpose());

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector probe(n);
  for (Eigen::Index i = 0; i < n; ++i) probe(i) = unif(gen);
  const double model = 0.5 * probe.dot(qp.Q * probe) + qp.c.dot(probe) + at_zero.value;
  const double actual = problem.smooth_value_grad(probe, theta).value + problem.q(probe, theta);
  if (std::abs(model - actual) > 1e-8 * (1.0 + std::abs(actual)))
    throw ConfigError("reference_solve: objective is not quadratic");

  const Matrix a = problem.constraint_matrix(theta);
  const Vector b = problem.constraint_offset(theta);
  const Eigen::Index m = a.rows();
  qp.G.resize(m + n, n);
  qp.G << a, -Matrix::Identity(n, n);
  qp.h.resize(m + n);
  qp.h << -b, Vector::Zero(n);
  qp.E = Matrix::Ones(1, n);
  qp.e = Vector::Ones(1);

  const QpSolution sol = solve_qp_ipm(qp);
  if (!(sol.kkt_residual <= kkt_tolerance))
    throw ConvergenceError("reference_solve: KKT residual " + std::to_string(sol.kkt_residual) +
                           " above tolerance");
  ReferenceSolution ref;
  ref.x = sol.x;
  ref.lambda = sol.z.head(m).cwiseMax(0.0);
  ref.f_star = evaluate_f(problem, sol.x, theta);
  ref.kkt_residual = sol.kkt_residual;
  return ref;
}

}  // namespace misalm
