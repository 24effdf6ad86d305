#pragma once

// Small dense kernels shared by the model, the learner and the reference
// solver: power iteration, cyclic Jacobi, simplex projection, soft
// thresholding.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "misalm/errors.hpp"

namespace misalm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct PowerIterationOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

inline Vector seeded_start(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unif(gen);
  return v / v.norm();
}

}  // namespace detail

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
inline double largest_eigenvalue_psd(const Matrix& m,
                                     const PowerIterationOptions& opt = {}) {
  if (m.rows() != m.cols()) throw DimensionError("matrix must be square");
  if (m.rows() == 0) return 0.0;
  Vector v = detail::seeded_start(m.rows(), opt.seed);
  double estimate = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Vector w = m * v;
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(next - estimate) <= opt.tolerance * std::max(1.0, std::abs(next))) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

/// Spectral norm ||A|| = sigma_max(A) via power iteration on A^T A.
inline double spectral_norm(const Matrix& a, const PowerIterationOptions& opt = {}) {
  if (a.size() == 0) return 0.0;
  Vector v = detail::seeded_start(a.cols(), opt.seed);
  double sigma_sq = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Vector w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(next - sigma_sq) <= opt.tolerance * std::max(1.0, std::abs(next))) {
      sigma_sq = next;
      break;
    }
    sigma_sq = next;
  }
  return std::sqrt(std::max(sigma_sq, 0.0));
}

struct SymmetricEigen {
  Vector values;   // unsorted, matching columns of vectors
  Matrix vectors;  // orthonormal columns
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. The input is
/// symmetrized as (M + M^T)/2 first. Sweeps stop once the off-diagonal
/// Frobenius norm drops below tol * ||M||_F (or an absolute floor for M = 0).
inline SymmetricEigen jacobi_eigen(const Matrix& m, double tol = 1e-12,
                                   int max_sweeps = 100) {
  if (m.rows() != m.cols()) throw DimensionError("jacobi_eigen: matrix must be square");
  const Eigen::Index n = m.rows();
  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J on rows/cols p, q.
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() > tol * scale * 1e3)
    throw ConvergenceError("jacobi_eigen did not converge");
  return {a.diagonal(), v};
}

/// Projection onto {X symmetric : X >= floor * I} by clamping eigenvalues.
inline Matrix project_eigen_floor(const Matrix& m, double floor) {
  SymmetricEigen eig = jacobi_eigen(m);
  Vector clamped = eig.values.cwiseMax(floor);
  Matrix out = eig.vectors * clamped.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

/// Euclidean projection onto the unit simplex {x >= 0, sum x = 1}
/// (sort-and-threshold; ties broken by a stable sort).
inline Vector project_simplex(const Vector& y) {
  const Eigen::Index n = y.size();
  if (n == 0) throw DimensionError("project_simplex: empty vector");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return y(a) > y(b); });
  double cumsum = 0.0;
  double shift = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u = y(order[static_cast<std::size_t>(j)]);
    cumsum += u;
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u - candidate > 0.0) shift = candidate;
  }
  return (y.array() - shift).cwiseMax(0.0).matrix();
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace misalm
