#include <cmath>
#include <numbers>

#include "dualscheme/problems.hpp"

namespace dualscheme {
namespace {

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v[i++] = value;
  return v;
}

Vec constant(int dim, double value) { return Vec::Constant(dim, value); }

constexpr double kCertTol = 1e-12;

// min x^2  s.t. x - 1 = 0,  Q = [-2, 2]
ProblemSpec p1() {
  auto h = [](const Vec& x) { return x[0] - 1.0; };
  return ProblemSpec{
      .name = "P1",
      .description = "min x^2 s.t. x - 1 = 0 on [-2, 2]",
      .dimension = 1,
      .objective = [](const Vec& x) { return x[0] * x[0]; },
      .constraints = {.equalities = {h},
                      .inequalities = {},
                      .cone_map = ConeMap{[h](const Vec& x) { return vec({h(x)}); }, Cone::zero(1)}},
      .ground = GroundSet(vec({-2.0}), vec({2.0})),
      .certified = Certificate{1.0, vec({1.0}), kCertTol, "analytic: the only feasible point is x = 1"},
      .bounds = SmoothnessBounds{4.0, 2.0, 1.0, 0.0, 3.0},
      .strong_duality = true,
      .duality_note = "convex equality QP; KKT multiplier -2",
  };
}

// min (x1-1)^2 + (x2-2)^2  s.t. x1 + x2 - 1 <= 0,  Q = [-5, 5]^2
ProblemSpec p2() {
  auto g = [](const Vec& x) { return x[0] + x[1] - 1.0; };
  return ProblemSpec{
      .name = "P2",
      .description = "min (x1-1)^2 + (x2-2)^2 s.t. x1 + x2 - 1 <= 0 on [-5, 5]^2",
      .dimension = 2,
      .objective = [](const Vec& x) { return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0); },
      .constraints = {.equalities = {},
                      .inequalities = {g},
                      .cone_map = ConeMap{[g](const Vec& x) { return vec({g(x)}); }, Cone::nonpositive_orthant(1)}},
      .ground = GroundSet(constant(2, -5.0), constant(2, 5.0)),
      .certified = Certificate{2.0, vec({0.0, 1.0}), kCertTol, "analytic: projection of (1, 2) onto x1 + x2 <= 1"},
      .bounds = SmoothnessBounds{2.0 * std::sqrt(85.0), 2.0, std::numbers::sqrt2, 0.0, 11.0},
      .strong_duality = true,
      .duality_note = "convex QP with Slater point; KKT multiplier 2",
  };
}

// min -x^2  s.t. x - 1 <= 0,  Q = [-0.5, 2]
ProblemSpec p3() {
  auto g = [](const Vec& x) { return x[0] - 1.0; };
  return ProblemSpec{
      .name = "P3",
      .description = "min -x^2 s.t. x - 1 <= 0 on [-0.5, 2] (nonconvex objective)",
      .dimension = 1,
      .objective = [](const Vec& x) { return -x[0] * x[0]; },
      .constraints = {.equalities = {},
                      .inequalities = {g},
                      .cone_map = ConeMap{[g](const Vec& x) { return vec({g(x)}); }, Cone::nonpositive_orthant(1)}},
      .ground = GroundSet(vec({-0.5}), vec({2.0})),
      .certified = Certificate{-1.0, vec({1.0}), kCertTol, "grid: feasible set [-0.5, 1], -x^2 least at x = 1"},
      .bounds = SmoothnessBounds{4.0, 2.0, 1.0, 0.0, 1.5},
      .strong_duality = true,
      .duality_note = "one-dimensional, optimal value function continuous at the origin",
  };
}

// min x1 + x2  s.t. (x1, x2, 1) in SOC(3),  Q = [-2, 2]^2
ProblemSpec p4() {
  return ProblemSpec{
      .name = "P4",
      .description = "min x1 + x2 s.t. |(x1, x2)| <= 1 as (x1, x2, 1) in SOC(3) on [-2, 2]^2",
      .dimension = 2,
      .objective = [](const Vec& x) { return x[0] + x[1]; },
      .constraints = {.equalities = {},
                      .inequalities = {},
                      .cone_map = ConeMap{[](const Vec& x) { return vec({x[0], x[1], 1.0}); }, Cone::second_order(3)}},
      .ground = GroundSet(constant(2, -2.0), constant(2, 2.0)),
      .certified = Certificate{-std::numbers::sqrt2, constant(2, -std::numbers::sqrt2 / 2.0), 1e-12,
                               "analytic: KKT on the unit disc"},
      .bounds = SmoothnessBounds{std::numbers::sqrt2, 0.0, 1.0, 0.0, 3.0},
      .strong_duality = true,
      .duality_note = "convex SOC program with Slater point",
  };
}

// min x1^2 + x2^2  s.t. x1 + x2 - 1 = 0, x1 - x2 <= 0,  Q = [-3, 3]^2
ProblemSpec p5() {
  auto h = [](const Vec& x) { return x[0] + x[1] - 1.0; };
  auto g = [](const Vec& x) { return x[0] - x[1]; };
  return ProblemSpec{
      .name = "P5",
      .description = "min x1^2 + x2^2 s.t. x1 + x2 - 1 = 0, x1 - x2 <= 0 on [-3, 3]^2",
      .dimension = 2,
      .objective = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; },
      .constraints = {.equalities = {h},
                      .inequalities = {g},
                      .cone_map = ConeMap{[h, g](const Vec& x) { return vec({h(x), g(x)}); },
                                          Cone::product({Cone::zero(1), Cone::nonpositive_orthant(1)})}},
      .ground = GroundSet(constant(2, -3.0), constant(2, 3.0)),
      .certified = Certificate{0.5, constant(2, 0.5), kCertTol, "analytic: KKT with multipliers (-1, 0)"},
      .bounds = SmoothnessBounds{2.0 * std::sqrt(18.0), 2.0, std::numbers::sqrt2, 0.0, std::sqrt(85.0)},
      .strong_duality = true,
      .duality_note = "convex QP, linear constraints",
  };
}

// P5 with the equality split: x1 - x2 <= 0, 1 - x1 - x2 <= 0.
ProblemSpec p5_ineq() {
  auto g1 = [](const Vec& x) { return x[0] - x[1]; };
  auto g2 = [](const Vec& x) { return 1.0 - x[0] - x[1]; };
  return ProblemSpec{
      .name = "P5-ineq",
      .description = "min x1^2 + x2^2 s.t. x1 - x2 <= 0, 1 - x1 - x2 <= 0 on [-3, 3]^2",
      .dimension = 2,
      .objective = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; },
      .constraints = {.equalities = {},
                      .inequalities = {g1, g2},
                      .cone_map = ConeMap{[g1, g2](const Vec& x) { return vec({g1(x), g2(x)}); },
                                          Cone::nonpositive_orthant(2)}},
      .ground = GroundSet(constant(2, -3.0), constant(2, 3.0)),
      .certified = Certificate{0.5, constant(2, 0.5), kCertTol, "analytic: KKT with multipliers (0, 1)"},
      .bounds = SmoothnessBounds{2.0 * std::sqrt(18.0), 2.0, std::numbers::sqrt2, 0.0, std::sqrt(85.0)},
      .strong_duality = true,
      .duality_note = "convex QP, linear constraints",
  };
}

// min x  s.t. x^2 <= 0,  Q = [-1, 1]. No exact l1 penalty: x + c x^2 has interior minimiser -1/(2c).
ProblemSpec p6() {
  auto g = [](const Vec& x) { return x[0] * x[0]; };
  return ProblemSpec{
      .name = "P6",
      .description = "min x s.t. x^2 <= 0 on [-1, 1] (no exact l1 penalty)",
      .dimension = 1,
      .objective = [](const Vec& x) { return x[0]; },
      .constraints = {.equalities = {},
                      .inequalities = {g},
                      .cone_map = ConeMap{[g](const Vec& x) { return vec({g(x)}); }, Cone::nonpositive_orthant(1)}},
      .ground = GroundSet(vec({-1.0}), vec({1.0})),
      .certified = Certificate{0.0, vec({0.0}), kCertTol, "analytic: the only feasible point is x = 0"},
      .bounds = SmoothnessBounds{1.0, 0.0, 2.0, 2.0, 1.0},
      .strong_duality = true,
      .duality_note = "optimal value function beta(y) = -sqrt(y) is continuous at 0; no KKT multiplier",
  };
}

}  // namespace

const std::vector<std::string>& library_problem_ids() {
  static const std::vector<std::string> ids = {"P1", "P2", "P3", "P4", "P5", "P5-ineq", "P6"};
  return ids;
}

ProblemSpec library_problem(std::string_view id) {
  if (id == "P1") return p1();
  if (id == "P2") return p2();
  if (id == "P3") return p3();
  if (id == "P4") return p4();
  if (id == "P5") return p5();
  if (id == "P5-ineq") return p5_ineq();
  if (id == "P6") return p6();
  throw ConfigurationError("unknown problem '" + std::string(id) + "'");
}

}  // namespace dualscheme
