#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dualscheme/problems.hpp"
#include "support.hpp"

namespace {

using namespace dualscheme;
using testing_support::random_vec;
using testing_support::vec;

TEST(GroundSet, MembershipAgreesWithProjection) {
  const GroundSet q(vec({-1.0, 0.0}), vec({1.0, 2.0}));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 500; ++k) {
    const Vec x = random_vec(rng, 2, 2.5);
    EXPECT_EQ(q.contains(x), q.project(x) == x);
    EXPECT_TRUE(q.contains(q.project(x)));
  }
  EXPECT_EQ(q.center(), vec({0.0, 1.0}));
  EXPECT_THROW(GroundSet(vec({1.0}), vec({0.0})), InputError);
  EXPECT_THROW(GroundSet(vec({-kInf}), vec({0.0})), InputError);
}

TEST(Problems, EvaluateConstraintsExamples) {
  const auto c1 = evaluate_constraints(library_problem("P1"), vec({0.5}));
  EXPECT_EQ(c1.h, vec({-0.5}));
  EXPECT_EQ(c1.g.size(), 0);
  const auto c2 = evaluate_constraints(library_problem("P2"), vec({0.0, 0.0}));
  EXPECT_EQ(c2.g, vec({-1.0}));
  const auto c4 = evaluate_constraints(library_problem("P4"), vec({0.0, 0.0}));
  EXPECT_EQ(c4.h.size(), 0);
  ASSERT_TRUE(c4.G.has_value());
  EXPECT_EQ(*c4.G, vec({0.0, 0.0, 1.0}));
  EXPECT_THROW(evaluate_constraints(library_problem("P4"), vec({0.0})), InputError);
}

TEST(Problems, InfeasibilityL1Examples) {
  const ProblemSpec p5 = library_problem("P5");
  EXPECT_DOUBLE_EQ(infeasibility_l1(p5, vec({0.0, 0.0})), 1.0);
  EXPECT_DOUBLE_EQ(infeasibility_l1(p5, vec({2.0, 0.0})), 3.0);
  EXPECT_DOUBLE_EQ(infeasibility_l1(p5, vec({0.5, 0.5})), 0.0);
}

TEST(Problems, InfeasibilityConeExamples) {
  EXPECT_DOUBLE_EQ(infeasibility_cone(library_problem("P1"), vec({0.5})), 0.5);
  EXPECT_DOUBLE_EQ(infeasibility_cone(library_problem("P1"), vec({1.0})), 0.0);
  ProblemSpec ray = library_problem("P6");
  ray.constraints.cone_map = ConeMap{[](const Vec& x) { return x; }, Cone::nonpositive_orthant(1)};
  EXPECT_DOUBLE_EQ(infeasibility_cone(ray, vec({2.0})), 2.0);
  EXPECT_NEAR(infeasibility_cone(library_problem("P4"), vec({2.0, 0.0})), (2.0 - 1.0) / std::sqrt(2.0), 1e-15);
}

TEST(Problems, LibraryIsCompleteAndValid) {
  const auto& ids = library_problem_ids();
  for (const char* id : {"P1", "P2", "P3", "P4", "P5", "P6", "P5-ineq"}) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
  }
  for (const auto& id : ids) {
    const ProblemSpec p = library_problem(id);
    EXPECT_NO_THROW(validate_problem(p)) << id;
    ASSERT_TRUE(p.certified.has_value()) << id;
    EXPECT_LE(infeasibility(p, p.certified->x_star), p.certified->tolerance) << id;
    EXPECT_NEAR(p.objective(p.certified->x_star), p.certified->f_star, p.certified->tolerance) << id;
  }
  EXPECT_THROW(library_problem("P99"), ConfigurationError);
}

TEST(Problems, ValidateRejectsBrokenCertificate) {
  ProblemSpec p = library_problem("P2");
  p.certified->f_star = 1.5;
  EXPECT_THROW(validate_problem(p), InputError);
}

TEST(ProblemProperties, BothInfeasibilityViewsAgreeOnEqualityInequalityLayouts) {
  std::mt19937_64 rng(5);
  for (const char* id : {"P1", "P2", "P3", "P5", "P5-ineq", "P6"}) {
    const ProblemSpec p = library_problem(id);
    for (int k = 0; k < 300; ++k) {
      const Vec x = p.ground.project(random_vec(rng, p.dimension, 5.0));
      // For K = {0}^m x R^l_-, the cone distance is the Euclidean norm of the violations,
      // the l1 measure their sum; both vanish together and l1 >= cone >= l1 / sqrt(m + l).
      const double l1 = infeasibility_l1(p, x);
      const double cone = infeasibility_cone(p, x);
      const double layout = static_cast<double>(p.constraint_layout_dim());
      EXPECT_LE(cone, l1 + 1e-12) << id;
      EXPECT_GE(cone, l1 / std::sqrt(layout) - 1e-12) << id;
      if (layout == 1.0) EXPECT_NEAR(cone, l1, 1e-12) << id;
    }
  }
}

TEST(ProblemProperties, OracleUpperValueNeverIncreasesOnNestedGrids) {
  // Every library box has equal sides, so width / (12 * 2^k) gives 12 * 2^k cells per axis and
  // each grid contains the previous one.
  for (const auto& id : library_problem_ids()) {
    const ProblemSpec p = library_problem(id);
    const double width = p.ground.upper()[0] - p.ground.lower()[0];
    double previous = kInf;
    for (int k = 0; k < 5; ++k) {
      const double res = width / (12.0 * (1 << k));
      const OracleResult r = brute_force_optimum(p, res, 1e-12);
      EXPECT_LE(r.f_upper, previous + 1e-12) << id << " at " << res;
      previous = r.f_upper;
    }
  }
}

TEST(ProblemProperties, PerturbationAtOriginEqualsOracle) {
  for (const auto& id : library_problem_ids()) {
    const ProblemSpec p = library_problem(id);
    const Vec zero = Vec::Zero(p.constraint_layout_dim());
    const OracleResult r = brute_force_optimum(p, 0.01, 1e-9);
    const PerturbationEstimate e = perturbation_estimate(p, {zero, 0.01}, 1e-9);
    EXPECT_EQ(e.value, r.f_upper) << id;
    EXPECT_EQ(e.x_best, r.x_best) << id;
  }
}

TEST(ProblemProperties, OracleMatchesCertifiedOptimum) {
  for (const auto& id : library_problem_ids()) {
    const ProblemSpec p = library_problem(id);
    const double res = 0.01;
    const OracleResult r = brute_force_optimum(p, res, 1e-9);
    ASSERT_TRUE(r.lower_certified) << id;
    const double allowance = p.bounds->objective_lipschitz * res * std::sqrt(static_cast<double>(p.dimension));
    EXPECT_LE(std::abs(r.f_upper - p.certified->f_star), p.certified->tolerance + allowance) << id;
    EXPECT_LE(r.f_lower, p.certified->f_star + p.certified->tolerance) << id;
  }
}

TEST(Problems, PerturbationShiftsTheFeasibleSet) {
  // P1 with h(x) = x - 1 = y has the single solution x = 1 + y, so beta(y) = (1 + y)^2.
  const ProblemSpec p1 = library_problem("P1");
  for (double y : {-0.5, -0.25, 0.25, 0.5}) {
    const PerturbationEstimate e = perturbation_estimate(p1, {vec({y}), 0.001}, 1e-9);
    EXPECT_NEAR(e.value, (1.0 + y) * (1.0 + y), 1e-9);
  }
  // P6: x^2 <= y gives beta(y) = -sqrt(y) for y >= 0.
  const ProblemSpec p6 = library_problem("P6");
  const PerturbationEstimate e = perturbation_estimate(p6, {vec({0.25}), 0.001}, 0.0);
  EXPECT_NEAR(e.value, -0.5, 1e-9);
  EXPECT_THROW(perturbation_estimate(p6, {vec({-0.1}), 0.01}, 0.0), InfeasibleAtResolution);
  EXPECT_THROW(perturbation_estimate(p6, {vec({0.1, 0.0}), 0.01}, 0.0), InputError);
}

TEST(Problems, OracleErrors) {
  const ProblemSpec p1 = library_problem("P1");
  EXPECT_THROW(brute_force_optimum(p1, 0.0, 0.0), InputError);
  ProblemSpec shifted = p1;
  shifted.constraints.equalities = {[](const Vec& x) { return x[0] - 1.0001; }};
  shifted.constraints.cone_map.reset();
  EXPECT_THROW(brute_force_optimum(shifted, 0.1, 0.0), InfeasibleAtResolution);
  ProblemSpec unbounded = p1;
  unbounded.bounds.reset();
  const OracleResult r = brute_force_optimum(unbounded, 0.1, 1e-9);
  EXPECT_FALSE(r.lower_certified);
  EXPECT_EQ(r.f_lower, -kInf);
}

}  // namespace
