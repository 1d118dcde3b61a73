#include <cmath>

#include <gtest/gtest.h>

#include "dualscheme/merit.hpp"
#include "support.hpp"

namespace {

using namespace dualscheme;
using testing_support::random_vec;
using testing_support::vec;

// One-dimensional problem with constant constraint values, for merit examples given in terms of h, g and G.
ProblemSpec constant_constraints(std::vector<double> h, std::vector<double> g) {
  ProblemSpec p{.name = "const", .dimension = 1, .objective = [](const Vec&) { return 0.0; },
                .ground = GroundSet(vec({-1.0}), vec({1.0}))};
  for (double v : h) p.constraints.equalities.push_back([v](const Vec&) { return v; });
  for (double v : g) p.constraints.inequalities.push_back([v](const Vec&) { return v; });
  return p;
}

ProblemSpec constant_cone_value(const Vec& value, const Cone& cone) {
  ProblemSpec p{.name = "cone", .dimension = 1, .objective = [](const Vec&) { return 0.0; },
                .ground = GroundSet(vec({-1.0}), vec({1.0}))};
  p.constraints.cone_map = ConeMap{[value](const Vec&) { return value; }, cone};
  return p;
}

TEST(Smoothing, EtaExamples) {
  EXPECT_DOUBLE_EQ(eta(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(eta(0.5, 2.0), 0.0625);
  EXPECT_DOUBLE_EQ(eta(-3.0, 0.0), 3.0);
  EXPECT_THROW(eta(1.0, -0.1), InputError);
}

TEST(Smoothing, GammaExamples) {
  EXPECT_DOUBLE_EQ(gamma_smooth(-1.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(gamma_smooth(3.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(gamma_smooth(1.0, 2.0), 0.25);
  EXPECT_DOUBLE_EQ(gamma_smooth(0.7, 0.0), 0.7);
  EXPECT_THROW(gamma_smooth(1.0, -0.1), InputError);
}

TEST(SmoothingProperties, UniformBoundsMonotonicityAndDerivatives) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> t_dist(-5.0, 5.0), w_dist(0.0, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const double t = t_dist(rng), w1 = w_dist(rng), w2 = w_dist(rng);
    const double lo = std::min(w1, w2), hi = std::max(w1, w2);
    EXPECT_LE(std::abs(eta(t, w1) - std::abs(t)), w1 / 2 + 1e-15);
    EXPECT_LE(std::abs(gamma_smooth(t, w1) - std::max(0.0, t)), w1 / 2 + 1e-15);
    EXPECT_GE(eta(t, lo), eta(t, hi));
    EXPECT_GE(gamma_smooth(t, lo), gamma_smooth(t, hi));
    EXPECT_GE(eta(t, w1), 0.0);
    EXPECT_GE(gamma_smooth(t, w1), 0.0);
    const double h = 1e-6;
    if (w1 > 1e-3) {
      const double de = (eta(t + h, w1) - eta(t - h, w1)) / (2 * h);
      const double dg = (gamma_smooth(t + h, w1) - gamma_smooth(t - h, w1)) / (2 * h);
      EXPECT_NEAR(de, eta_derivative(t, w1), 1e-6);
      EXPECT_NEAR(dg, gamma_smooth_derivative(t, w1), 1e-6);
    }
  }
}

TEST(Omega, ValuesAndDomain) {
  EXPECT_DOUBLE_EQ(OmegaFunction::identity()(0.2), 0.2);
  EXPECT_DOUBLE_EQ(OmegaFunction::power(2.0)(0.5), 0.25);
  EXPECT_EQ(OmegaFunction::barrier_log(0.5)(0.5), kInf);
  EXPECT_EQ(OmegaFunction::barrier_log(0.5)(0.7), kInf);
  EXPECT_NEAR(OmegaFunction::barrier_log(1.0)(0.5), std::log(2.0), 1e-15);
  for (const auto& w : {OmegaFunction::identity(), OmegaFunction::power(1.5), OmegaFunction::barrier_log(2.0)}) {
    EXPECT_EQ(w(0.0), 0.0);
    double prev = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double value = w(0.019 * k);
      EXPECT_GT(value, prev) << w.to_string();
      prev = value;
    }
    EXPECT_EQ(OmegaFunction::parse(w.to_string()), w);
  }
  EXPECT_THROW(OmegaFunction::power(0.5), InputError);
  EXPECT_THROW(OmegaFunction::parse("power:0.5"), ConfigurationError);
  EXPECT_THROW(OmegaFunction::parse("cubic"), ConfigurationError);
}

TEST(Merit, PenaltyExamples) {
  const ProblemSpec p6 = library_problem("P6");
  EXPECT_DOUBLE_EQ(phi_penalty(p6, vec({0.0}), 7.0, OmegaFunction::identity()), 0.0);
  const ProblemSpec infeasible = constant_constraints({}, {0.2});
  EXPECT_DOUBLE_EQ(phi_penalty(infeasible, vec({0.0}), 3.0, OmegaFunction::identity()), 0.6);
  const ProblemSpec half = constant_constraints({}, {0.5});
  EXPECT_EQ(phi_penalty(half, vec({0.0}), 1.0, OmegaFunction::barrier_log(0.5)), kInf);
  EXPECT_DOUBLE_EQ(merit_eval(p6, vec({-0.25}), PenaltyParam{2.0, OmegaFunction::identity()}), -0.125);
}

TEST(Merit, WeightedExamples) {
  const ProblemSpec p = constant_constraints({-0.5}, {0.3});
  EXPECT_DOUBLE_EQ(phi_weighted(p, vec({0.0}), vec({2.0}), vec({4.0}), 0.0), 2.2);
  EXPECT_NEAR(phi_weighted(p, vec({0.0}), vec({2.0}), vec({4.0}), 1.0), 0.43, 1e-15);
  const ProblemSpec p5 = library_problem("P5");
  const Vec feasible = vec({0.5, 0.5});
  EXPECT_EQ(merit_eval(p5, feasible, WeightedParam{vec({3.0}), vec({9.0}), 0.7}), p5.objective(feasible));
}

TEST(Merit, HprExamples) {
  const ProblemSpec p1 = library_problem("P1");
  EXPECT_NEAR(phi_hpr(p1, vec({0.5}), vec({0.0}), 2.0), 0.25, 1e-15);
  EXPECT_NEAR(merit_eval(p1, vec({0.5}), MultiplierParam{vec({0.0}), 2.0}), 0.5, 1e-15);
  const ProblemSpec ray = constant_cone_value(vec({-2.0}), Cone::nonpositive_orthant(1));
  EXPECT_DOUBLE_EQ(phi_hpr(ray, vec({0.0}), vec({1.0}), 1.0), -0.5);
  EXPECT_DOUBLE_EQ(phi_hpr(p1, vec({1.0}), vec({0.0}), 5.0), 0.0);
  EXPECT_THROW(phi_hpr(ray, vec({0.0}), vec({-1.0}), 1.0), InputError);
  EXPECT_THROW(phi_hpr(p1, vec({0.5}), vec({0.0}), 0.0), InputError);
}

TEST(MeritProperties, HprFormsAgreeAndRespectLowerBound) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c_dist(0.01, 50.0);
  const std::vector<Cone> cones = {Cone::zero(2), Cone::nonpositive_orthant(3), Cone::second_order(3),
                                   Cone::parse("zero:1 x orthant-:2")};
  for (const Cone& k : cones) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Vec lambda = project(polar(k), random_vec(rng, k.dim()));
      const Vec g = random_vec(rng, k.dim());
      const double c = c_dist(rng);
      const double a = hpr_term_projection_form(k, lambda, c, g);
      const double b = hpr_term_distance_form(k, lambda, c, g);
      EXPECT_LE(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a))) << k.to_string();
      EXPECT_GE(a, -lambda.squaredNorm() / (2 * c) - 1e-12) << k.to_string();
    }
  }
}

TEST(MeritProperties, HprAtFeasiblePointsIsNonpositiveAndVanishesForLargeC) {
  const ProblemSpec p5 = library_problem("P5");
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec x = vec({0.2, 0.8});  // strictly feasible for the inequality
    Vec lambda = random_vec(rng, 2);
    lambda[1] = std::max(0.0, lambda[1]);
    EXPECT_LE(phi_hpr(p5, x, lambda, 1.0), 1e-15);
    lambda[1] = 0.0;
    EXPECT_LE(std::abs(phi_hpr(p5, x, lambda, 1e8)), 1e-7);
  }
}

TEST(MeritProperties, WeightedAndPenaltyVanishAtFeasiblePoints) {
  const ProblemSpec p2 = library_problem("P2");
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 500; ++trial) {
    Vec x = random_vec(rng, 2, 5.0);
    if (x.sum() > 1.0) x.array() -= x.sum();  // move onto the feasible side
    EXPECT_EQ(phi_weighted(p2, x, Vec(0), vec({5.0}), 0.3), 0.0);
    EXPECT_EQ(phi_penalty(p2, x, 5.0, OmegaFunction::power(2.0)), 0.0);
  }
}

TEST(Merit, PalmExamples) {
  const PFunction hpr = PFunction::hpr();
  EXPECT_DOUBLE_EQ(phi_palm(constant_constraints({}, {-0.5}), vec({0.0}), vec({0.0}), 2.0, hpr), 0.0);
  EXPECT_DOUBLE_EQ(phi_palm(constant_constraints({}, {1.0}), vec({0.0}), vec({2.0}), 1.0, hpr), 2.5);
  EXPECT_DOUBLE_EQ(phi_palm(constant_constraints({}, {-5.0}), vec({0.0}), vec({2.0}), 1.0, hpr), -2.0);
  EXPECT_THROW(phi_palm(constant_constraints({}, {1.0}), vec({0.0}), vec({-1.0}), 1.0, hpr), InputError);
}

TEST(Merit, PDerivativeExamples) {
  EXPECT_DOUBLE_EQ(p_derivative(PFunction::hpr(), 1.0, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(p_derivative(PFunction::hpr(), -5.0, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(p_derivative(PFunction::exponential(), 0.0, 3.0), 3.0);
  EXPECT_THROW(p_derivative(PFunction::hpr(), kInf, 1.0), DomainError);
}

TEST(MeritProperties, PFunctionAxioms) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> s_dist(-6.0, 3.0), t_dist(0.0, 4.0);
  for (const PFunction& p : {PFunction::hpr(), PFunction::exponential()}) {
    for (int k = 0; k < 5000; ++k) {
      const double s1 = s_dist(rng), s2 = s_dist(rng), t = t_dist(rng);
      EXPECT_EQ(p(0.0, t), 0.0);
      EXPECT_LE(p(std::min(s1, s2), t), p(std::max(s1, s2), t) + 1e-15);
      EXPECT_GE(p(s1, t), p.r(t) - 1e-12);
      const double h = 1e-6;
      const double numeric = (p(s1 + h, t) - p(s1 - h, t)) / (2 * h);
      EXPECT_NEAR(numeric, p_derivative(p, s1, t), 1e-6 * std::max(1.0, std::abs(numeric))) << p.to_string();
      EXPECT_GE(p_derivative(p, s1, t), 0.0);
    }
  }
}

TEST(Merit, ValidateParamMatchesProblemForm) {
  const ProblemSpec p4 = library_problem("P4");
  const ProblemSpec p5 = library_problem("P5");
  EXPECT_THROW(validate_merit_param(p4, WeightedParam{Vec(0), Vec(0), 1.0}), ConfigurationError);
  EXPECT_THROW(validate_merit_param(p5, PalmParam{vec({1.0}), 1.0, PFunction::hpr()}), ConfigurationError);
  EXPECT_THROW(validate_merit_param(p5, WeightedParam{vec({-1.0}), vec({1.0}), 1.0}), InputError);
  EXPECT_THROW(validate_merit_param(p5, MultiplierParam{vec({0.0, -1.0}), 1.0}), InputError);
  EXPECT_THROW(validate_merit_param(p5, PenaltyParam{-1.0, OmegaFunction::identity()}), InputError);
  EXPECT_NO_THROW(validate_merit_param(p5, MultiplierParam{vec({-3.0, 1.0}), 1.0}));
  EXPECT_NO_THROW(validate_merit_param(p4, MultiplierParam{vec({0.3, 0.4, -0.5}), 1.0}));
}

// Finite differences must respect the derivative bounds the inner solver relies on.
TEST(MeritProperties, DerivativeBoundsHoldOnSamples) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<std::pair<std::string, MeritParam>> cases = {
      {"P6", PenaltyParam{7.0, OmegaFunction::identity()}},
      {"P1", PenaltyParam{3.0, OmegaFunction::power(2.0)}},
      {"P5", WeightedParam{vec({2.0}), vec({1.5}), 0.3}},
      {"P2", WeightedParam{Vec(0), vec({4.0}), 0.01}},
      {"P4", MultiplierParam{vec({0.5, -0.2, -1.0}), 8.0}},
      {"P1", MultiplierParam{vec({-2.0}), 20.0}},
      {"P5-ineq", PalmParam{vec({0.5, 1.0}), 4.0, PFunction::hpr()}},
      {"P6", PalmParam{vec({0.7}), 1.5, PFunction::exponential()}},
  };
  for (const auto& [id, mu] : cases) {
    const ProblemSpec p = library_problem(id);
    const MeritBounds b = merit_bounds(p, mu);
    ASSERT_TRUE(b.lipschitz.has_value()) << id;
    for (int k = 0; k < 400; ++k) {
      Vec x(p.dimension), y(p.dimension);
      for (int i = 0; i < p.dimension; ++i) {
        const double lo = p.ground.lower()[i], hi = p.ground.upper()[i];
        x[i] = lo + (hi - lo) * unit(rng);
        y[i] = lo + (hi - lo) * unit(rng);
      }
      const double fx = merit_eval(p, x, mu), fy = merit_eval(p, y, mu);
      EXPECT_LE(std::abs(fx - fy), *b.lipschitz * (x - y).norm() * (1 + 1e-9) + 1e-12) << id;
      if (b.curvature) {
        for (int i = 0; i < p.dimension; ++i) {
          const double h = 1e-3;
          Vec xp = x, xm = x;
          xp[i] = std::min(x[i] + h, p.ground.upper()[i]);
          xm[i] = std::max(x[i] - h, p.ground.lower()[i]);
          const double hp = xp[i] - x[i], hm = x[i] - xm[i];
          if (hp < h || hm < h) continue;
          const double second = (merit_eval(p, xp, mu) - 2 * fx + merit_eval(p, xm, mu)) / (h * h);
          EXPECT_LE(std::abs(second), *b.curvature * (1 + 1e-6) + 1e-6) << id;
        }
      }
    }
  }
}

}  // namespace
