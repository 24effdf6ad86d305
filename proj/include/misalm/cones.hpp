#pragma once

// Projection and distance calculus for proper cones K, their duals K* and
// their reflections -K. Everything is Euclidean.

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "misalm/errors.hpp"

namespace misalm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Cone {
 public:
  enum class Kind { Zero, NonnegativeOrthant, SecondOrder, Product };

  static Cone zero(Eigen::Index dim) { return Cone(Kind::Zero, dim); }
  static Cone nonnegative_orthant(Eigen::Index dim) {
    return Cone(Kind::NonnegativeOrthant, dim);
  }
  /// {(t, u) : ||u|| <= t}, with t stored first.
  static Cone second_order(Eigen::Index dim) {
    return Cone(Kind::SecondOrder, dim);
  }
  static Cone product(std::vector<Cone> parts) {
    if (parts.empty()) throw ConfigError("product cone needs at least one part");
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.dim();
    Cone c(Kind::Product, total);
    c.parts_ = std::move(parts);
    return c;
  }

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<Cone>& parts() const { return parts_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Zero: return "zero(" + std::to_string(dim_) + ")";
      case Kind::NonnegativeOrthant: return "orthant(" + std::to_string(dim_) + ")";
      case Kind::SecondOrder: return "soc(" + std::to_string(dim_) + ")";
      case Kind::Product: break;
    }
    std::string s = "product[";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += parts_[i].name();
    }
    return s + "]";
  }

 private:
  Cone(Kind k, Eigen::Index dim) : kind_(k), dim_(dim) {
    if (dim <= 0) throw ConfigError("cone dimension must be positive");
  }

  Kind kind_;
  Eigen::Index dim_;
  std::vector<Cone> parts_;
};

namespace detail {

inline void check_dim(const Cone& cone, const Vector& y) {
  if (y.size() != cone.dim())
    throw DimensionError("cone " + cone.name() + " expects length " +
                         std::to_string(cone.dim()) + ", got " +
                         std::to_string(y.size()));
}

// Three-case closed form; the boundary case ||u|| == |t| falls into the
// scaling branch, which is continuous there.
inline void project_soc_inplace(Eigen::Ref<Vector> y) {
  const double t = y(0);
  const double unorm = y.tail(y.size() - 1).norm();
  if (unorm <= t) return;
  if (unorm <= -t) {
    y.setZero();
    return;
  }
  const double scale = 0.5 * (t + unorm);
  y(0) = scale;
  y.tail(y.size() - 1) *= scale / unorm;
}

template <class Leaf>
void for_each_leaf(const Cone& cone, Eigen::Ref<Vector> y, Leaf&& leaf) {
  if (cone.kind() != Cone::Kind::Product) {
    leaf(cone, y);
    return;
  }
  Eigen::Index offset = 0;
  for (const auto& part : cone.parts()) {
    for_each_leaf(part, y.segment(offset, part.dim()), leaf);
    offset += part.dim();
  }
}

}  // namespace detail

/// Euclidean projection onto K.
inline Vector project(const Cone& cone, const Vector& y) {
  detail::check_dim(cone, y);
  Vector out = y;
  detail::for_each_leaf(cone, out, [](const Cone& c, Eigen::Ref<Vector> seg) {
    switch (c.kind()) {
      case Cone::Kind::Zero: seg.setZero(); break;
      case Cone::Kind::NonnegativeOrthant: seg = seg.cwiseMax(0.0); break;
      case Cone::Kind::SecondOrder: detail::project_soc_inplace(seg); break;
      case Cone::Kind::Product: break;
    }
  });
  return out;
}

/// Projection onto the dual cone K*. The orthant and the second-order cone are
/// self-dual; the dual of {0} is the whole space.
inline Vector project_dual(const Cone& cone, const Vector& y) {
  detail::check_dim(cone, y);
  Vector out = y;
  detail::for_each_leaf(cone, out, [](const Cone& c, Eigen::Ref<Vector> seg) {
    switch (c.kind()) {
      case Cone::Kind::Zero: break;
      case Cone::Kind::NonnegativeOrthant: seg = seg.cwiseMax(0.0); break;
      case Cone::Kind::SecondOrder: detail::project_soc_inplace(seg); break;
      case Cone::Kind::Product: break;
    }
  });
  return out;
}

/// Projection onto -K, i.e. -project(K, -y).
inline Vector project_neg(const Cone& cone, const Vector& y) {
  detail::check_dim(cone, y);
  return -project(cone, -y);
}

/// d_K(y)
inline double dist(const Cone& cone, const Vector& y) {
  return (y - project(cone, y)).norm();
}

/// d_{-K}(y)
inline double dist_neg(const Cone& cone, const Vector& y) {
  return (y - project_neg(cone, y)).norm();
}

/// Gradient of d^2_{-K} at y: 2(y - Π_{-K}(y)).
inline Vector dist_neg_sq_grad(const Cone& cone, const Vector& y) {
  return 2.0 * (y - project_neg(cone, y));
}

/// Membership test for K* with an absolute tolerance on the distance.
inline bool in_dual(const Cone& cone, const Vector& y, double tol = 0.0) {
  return (y - project_dual(cone, y)).norm() <= tol;
}

}  // namespace misalm
