#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dualscheme/cones.hpp"
#include "support.hpp"

namespace {

using namespace dualscheme;
using testing_support::random_vec;
using testing_support::vec;

std::vector<Cone> all_variants() {
  return {Cone::zero(3),
          Cone::free(2),
          Cone::nonpositive_orthant(4),
          Cone::nonnegative_orthant(3),
          Cone::second_order(3),
          Cone::second_order(5),
          Cone::negative_second_order(3),
          Cone::parse("zero:1 x orthant-:2"),
          Cone::parse("soc:3 x orthant-:1 x zero:2")};
}

// Distance from y to SOC(3) by scanning the boundary rays (r cos a, r sin a, r) plus the apex.
double soc3_distance_by_grid(const Vec& y, int angles, int radii, double r_max) {
  if (std::hypot(y[0], y[1]) <= y[2]) return 0.0;
  double best = y.norm();
  for (int i = 0; i < angles; ++i) {
    const double a = 2.0 * std::numbers::pi * i / angles;
    for (int j = 1; j <= radii; ++j) {
      const double r = r_max * j / radii;
      const double d = std::sqrt(std::pow(y[0] - r * std::cos(a), 2) + std::pow(y[1] - r * std::sin(a), 2) +
                                 std::pow(y[2] - r, 2));
      best = std::min(best, d);
    }
  }
  return best;
}

TEST(Cones, PolarOfOrthantIsNonnegativeOrthant) {
  EXPECT_EQ(polar(Cone::nonpositive_orthant(2)), Cone::nonnegative_orthant(2));
  EXPECT_TRUE(contains(polar(Cone::nonpositive_orthant(2)), vec({1.0, 0.0})));
  EXPECT_FALSE(contains(polar(Cone::nonpositive_orthant(2)), vec({1.0, -0.1})));
}

TEST(Cones, PolarOfZeroIsWholeSpace) {
  const Cone p = polar(Cone::zero(3));
  EXPECT_EQ(p, Cone::free(3));
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vec y = random_vec(rng, 3);
    EXPECT_TRUE(contains(p, y));
    EXPECT_EQ(project(p, y), y);
  }
}

TEST(Cones, BipolarIsIdentity) {
  for (const Cone& k : all_variants()) EXPECT_EQ(polar(polar(k)), k) << k.to_string();
}

TEST(Cones, ProjectionExamples) {
  EXPECT_EQ(project(Cone::nonpositive_orthant(2), vec({3.0, -1.0})), vec({0.0, -1.0}));
  EXPECT_EQ(project(Cone::zero(2), vec({5.0, -7.0})), vec({0.0, 0.0}));
  const Vec p = project(Cone::second_order(3), vec({3.0, 4.0, 0.0}));
  EXPECT_NEAR(p[0], 1.5, 1e-15);
  EXPECT_NEAR(p[1], 2.0, 1e-15);
  EXPECT_NEAR(p[2], 2.5, 1e-15);
}

TEST(Cones, PolarProjectionExamples) {
  EXPECT_EQ(project_polar(Cone::nonpositive_orthant(2), vec({3.0, -1.0})), vec({3.0, 0.0}));
  const Vec r = project_polar(Cone::second_order(3), vec({3.0, 4.0, 0.0}));
  EXPECT_NEAR(r[0], 1.5, 1e-15);
  EXPECT_NEAR(r[1], 2.0, 1e-15);
  EXPECT_NEAR(r[2], -2.5, 1e-15);
  EXPECT_TRUE(contains(Cone::negative_second_order(3), r, 1e-12));
  const Vec inside = vec({0.3, -0.4, 1.0});
  EXPECT_DOUBLE_EQ(project_polar(Cone::second_order(3), inside).norm(), 0.0);
}

TEST(Cones, DistanceExamples) {
  EXPECT_DOUBLE_EQ(distance(Cone::zero(1), vec({-0.5})), 0.5);
  EXPECT_DOUBLE_EQ(distance(Cone::nonpositive_orthant(3), vec({-1.0, 0.0, -2.0})), 0.0);
  EXPECT_NEAR(distance(Cone::second_order(3), vec({3.0, 4.0, 0.0})), 2.5 * std::sqrt(2.0), 1e-12);
}

TEST(Cones, SocTieAtZeroAxis) {
  EXPECT_EQ(project(Cone::second_order(3), vec({0.0, 0.0, 2.0})), vec({0.0, 0.0, 2.0}));
  EXPECT_EQ(project(Cone::second_order(3), vec({0.0, 0.0, -2.0})), vec({0.0, 0.0, 0.0}));
}

TEST(Cones, DimensionMismatchIsAnInputError) {
  EXPECT_THROW(project(Cone::zero(2), vec({1.0})), InputError);
  EXPECT_THROW(distance(Cone::second_order(3), vec({1.0, 2.0})), InputError);
  EXPECT_THROW(project_polar(Cone::nonpositive_orthant(1), vec({1.0, 2.0})), InputError);
}

TEST(Cones, ParseProductExpressions) {
  const Cone k = Cone::parse("zero:1 x orthant-:2 x soc:3");
  EXPECT_EQ(k.dim(), 6);
  ASSERT_EQ(k.factors().size(), 3u);
  EXPECT_EQ(k.factors()[2].kind, ConeKind::SecondOrder);
  EXPECT_EQ(Cone::parse(k.to_string()), k);
  EXPECT_EQ(Cone::parse("free:2 x orthant+:1 x -soc:2").dim(), 5);
  EXPECT_THROW(Cone::parse("cube:3"), ConfigurationError);
  EXPECT_THROW(Cone::parse("zero"), ConfigurationError);
  EXPECT_THROW(Cone::parse("zero:0"), ConfigurationError);
  EXPECT_THROW(Cone::parse("soc:1"), ConfigurationError);
  EXPECT_THROW(Cone::parse(""), ConfigurationError);
}

TEST(Cones, NestedProductsFlatten) {
  const Cone inner = Cone::product({Cone::zero(1), Cone::second_order(2)});
  const Cone outer = Cone::product({inner, Cone::nonpositive_orthant(1)});
  EXPECT_EQ(outer.factors().size(), 3u);
  EXPECT_EQ(outer.dim(), 4);
}

TEST(ConeProperties, MoreauDecomposition) {
  std::mt19937_64 rng(20240611);
  for (const Cone& k : all_variants()) {
    const Cone kp = polar(k);
    double worst_identity = 0.0, worst_orth = 0.0, worst_split = 0.0, worst_polar = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Vec y = random_vec(rng, k.dim());
      const Vec a = project(k, y);
      const Vec b = project_polar(k, y);
      worst_identity = std::max(worst_identity, (y - a - b).norm());
      worst_orth = std::max(worst_orth, std::abs(a.dot(b)));
      const double dk = distance(k, y), dkp = distance(kp, y);
      worst_split = std::max(worst_split, std::abs(dk * dk + dkp * dkp - y.squaredNorm()));
      worst_polar = std::max(worst_polar, (b - project(kp, y)).norm());
    }
    EXPECT_LE(worst_identity, 1e-10) << k.to_string();
    EXPECT_LE(worst_orth, 1e-10) << k.to_string();
    EXPECT_LE(worst_split, 1e-10) << k.to_string();
    EXPECT_LE(worst_polar, 1e-10) << k.to_string();
  }
}

TEST(ConeProperties, ProjectionIsIdempotentAndLandsInCone) {
  std::mt19937_64 rng(7);
  for (const Cone& k : all_variants()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec p = project(k, random_vec(rng, k.dim()));
      EXPECT_TRUE(contains(k, p, 1e-12)) << k.to_string();
      EXPECT_LE((project(k, p) - p).norm(), 1e-12) << k.to_string();
    }
  }
}

TEST(ConeProperties, ProjectionIsNonexpansive) {
  std::mt19937_64 rng(8);
  for (const Cone& k : all_variants()) {
    for (int trial = 0; trial < 500; ++trial) {
      const Vec y = random_vec(rng, k.dim());
      const Vec z = random_vec(rng, k.dim());
      EXPECT_LE((project(k, y) - project(k, z)).norm(), (y - z).norm() + 1e-12) << k.to_string();
    }
  }
}

TEST(ConeProperties, EqualityInequalityPolarFormula) {
  const Cone k = Cone::product({Cone::zero(2), Cone::nonpositive_orthant(3)});
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec y = random_vec(rng, 5);
    Vec expected = y;
    for (int i = 2; i < 5; ++i) expected[i] = std::max(0.0, y[i]);
    EXPECT_LE((project_polar(k, y) - expected).norm(), 1e-15);
  }
}

TEST(ConeProperties, SocProjectionMatchesGridOracle) {
  std::mt19937_64 rng(10);
  const int angles = 1440, radii = 1200;
  const double r_max = 6.0;
  // Boundary grid spacing bounds how far the oracle can sit above the true distance.
  const double slack = r_max * std::numbers::pi / angles * std::sqrt(2.0) + std::sqrt(2.0) * r_max / radii;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec y = random_vec(rng, 3);
    const double exact = distance(Cone::second_order(3), y);
    const double oracle = soc3_distance_by_grid(y, angles, radii, r_max);
    EXPECT_LE(exact, oracle + 1e-12);
    EXPECT_LE(oracle - exact, slack);
  }
}

TEST(ConeProperties, BoundedProjectionStaysInBallAndCone) {
  std::mt19937_64 rng(11);
  for (const Cone& k : all_variants()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vec p = project_onto_bounded(k, random_vec(rng, k.dim(), 10.0), 1.5);
      EXPECT_LE(p.norm(), 1.5 + 1e-12);
      EXPECT_TRUE(contains(k, p, 1e-12));
    }
  }
  EXPECT_THROW(project_onto_bounded(Cone::zero(1), vec({1.0}), 0.0), InputError);
}

}  // namespace
