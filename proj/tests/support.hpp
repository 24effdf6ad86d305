#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>

#include "misalm/model.hpp"

namespace misalm::testing {

inline Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

inline Vector random_simplex_point(std::mt19937_64& gen, Eigen::Index n) {
  std::exponential_distribution<double> expo(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = expo(gen);
  return v / v.sum();
}

inline Matrix random_psd(std::mt19937_64& gen, Eigen::Index n, double shift = 0.1) {
  Matrix r(n, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = normal(gen);
  return r.transpose() * r / static_cast<double>(n) + shift * Matrix::Identity(n, n);
}

/// Central differences of a scalar function along every coordinate.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// min 1/2 ||x - c||^2 over the simplex in R^2 subject to x_1 <= limit.
inline ParametricProblem tiny_qp(const Vector& c, double limit) {
  QuadraticSimplexSpec spec;
  spec.hessian = [](const Parameter&) { return Matrix::Identity(2, 2); };
  spec.linear = [c](const Parameter&) { return Vector(-c); };
  spec.A = Matrix(1, 2);
  spec.A << 1.0, 0.0;
  spec.b = Vector::Constant(1, -limit);
  spec.L_p_x = 1.0;
  spec.L_f = 0.0;
  return make_quadratic_simplex_problem(spec);
}

}  // namespace misalm::testing
