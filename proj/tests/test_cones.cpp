#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "misalm/cones.hpp"
#include "support.hpp"

using namespace misalm;
using misalm::testing::random_vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<Cone> all_variants() {
  return {Cone::zero(4), Cone::nonnegative_orthant(5), Cone::second_order(4),
          Cone::product({Cone::second_order(3), Cone::nonnegative_orthant(2), Cone::zero(1)})};
}

}  // namespace

TEST(Cones, OrthantClampsNegativeEntries) {
  EXPECT_TRUE(project(Cone::nonnegative_orthant(2), vec({-1, 2})).isApprox(vec({0, 2})));
}

TEST(Cones, SecondOrderIsIdentityOnMembers) {
  const Vector y = vec({2.0, 1.0, -1.0});
  EXPECT_TRUE(project(Cone::second_order(3), y).isApprox(y));
}

TEST(Cones, SecondOrderBoundaryScaling) {
  const Cone k = Cone::second_order(2);
  const Vector y = vec({0.0, -1.0});
  const Vector p = project(k, y);
  EXPECT_NEAR(p(0), 0.5, 1e-15);
  EXPECT_NEAR(p(1), -0.5, 1e-15);

  // Brute force: sample the boundary rays r (1, +-1) on a fine grid.
  double best = 1e300;
  for (int sign : {-1, 1})
    for (int i = 0; i <= 200000; ++i) {
      const double r = 2.0 * i / 200000.0;
      const Vector s = vec({r, sign * r});
      best = std::min(best, (y - s).norm());
    }
  EXPECT_NEAR((y - p).norm(), best, 1e-9);
}

TEST(Cones, SecondOrderPolarMapsToOrigin) {
  EXPECT_TRUE(project(Cone::second_order(3), vec({-3.0, 1.0, 1.0})).isZero(0.0));
}

TEST(Cones, SelfDualConesProjectDualEqualsProject) {
  std::mt19937_64 gen(11);
  for (const Cone& k : {Cone::nonnegative_orthant(6), Cone::second_order(6)}) {
    for (int t = 0; t < 50; ++t) {
      const Vector y = random_vector(gen, 6);
      EXPECT_TRUE(project_dual(k, y).isApprox(project(k, y), 1e-14));
    }
  }
}

TEST(Cones, ZeroConeDualIsWholeSpace) {
  const Vector y = vec({1.0, -2.0, 3.0});
  EXPECT_EQ(project_dual(Cone::zero(3), y), y);
  EXPECT_TRUE(project(Cone::zero(3), y).isZero(0.0));
}

TEST(Cones, ProjectNegExamples) {
  EXPECT_TRUE(project_neg(Cone::nonnegative_orthant(2), vec({-1, 2})).isApprox(vec({-1, 0})));
  std::mt19937_64 gen(3);
  for (const Cone& k : all_variants()) {
    const Vector member_of_neg = -project(k, random_vector(gen, k.dim()));
    EXPECT_TRUE(project_neg(k, member_of_neg).isApprox(member_of_neg, 1e-14)) << k.name();
  }
}

TEST(Cones, DistanceToNegativeOrthant) {
  EXPECT_DOUBLE_EQ(dist_neg(Cone::nonnegative_orthant(2), vec({3, -1})), 3.0);
  EXPECT_DOUBLE_EQ(dist_neg(Cone::nonnegative_orthant(2), vec({-3, -1})), 0.0);
}

TEST(Cones, SquaredDistanceGradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(5);
  for (const Cone& k : all_variants()) {
    for (int t = 0; t < 20; ++t) {
      const Vector y = random_vector(gen, k.dim());
      const auto d2 = [&](const Vector& z) {
        const double d = dist_neg(k, z);
        return d * d;
      };
      const Vector fd = misalm::testing::central_difference(d2, y);
      const Vector g = dist_neg_sq_grad(k, y);
      EXPECT_LE((fd - g).norm(), 1e-6 * std::max(1.0, g.norm())) << k.name();
    }
  }
}

TEST(Cones, PropertySuite) {
  std::mt19937_64 gen(2024);
  for (const Cone& k : all_variants()) {
    for (int t = 0; t < 2000; ++t) {
      const Vector y = random_vector(gen, k.dim(), 3.0);
      const Vector z = random_vector(gen, k.dim(), 3.0);
      const Vector p = project(k, y);
      EXPECT_LE((project(k, p) - p).norm(), 1e-12);
      EXPECT_LE((p - project(k, z)).norm(), (y - z).norm() + 1e-12);
      const Vector neg = project_neg(k, y);
      const Vector dual = project_dual(k, y);
      EXPECT_LE((neg + dual - y).norm(), 1e-10);
      EXPECT_LE(std::abs(neg.dot(dual)), 1e-10);
      EXPECT_LE(dist(k, y + z), dist(k, y) + z.norm() + 1e-12);
      EXPECT_NEAR(dist(k, -y), dist_neg(k, y), 1e-12);
      EXPECT_TRUE(in_dual(k, dual, 1e-12));
    }
  }
}

TEST(Cones, ProductDimensionIsSumOfParts) {
  const Cone k = Cone::product({Cone::second_order(3), Cone::nonnegative_orthant(2)});
  EXPECT_EQ(k.dim(), 5);
  const Vector y = vec({0.0, -1.0, 0.0, -2.0, 4.0});
  const Vector p = project(k, y);
  EXPECT_TRUE(p.head(3).isApprox(project(Cone::second_order(3), y.head(3))));
  EXPECT_TRUE(p.tail(2).isApprox(vec({0.0, 4.0})));
}

TEST(Cones, RejectsBadShapes) {
  EXPECT_THROW(project(Cone::nonnegative_orthant(3), Vector::Zero(2)), DimensionError);
  EXPECT_THROW(dist_neg(Cone::second_order(3), Vector::Zero(4)), DimensionError);
  EXPECT_THROW(Cone::product({}), ConfigError);
  EXPECT_THROW(Cone::nonnegative_orthant(0), ConfigError);
}
