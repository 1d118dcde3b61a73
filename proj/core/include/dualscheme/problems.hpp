#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualscheme/common.hpp"
#include "dualscheme/cones.hpp"

namespace dualscheme {

using ScalarFunction = std::function<double(const Vec&)>;
using VectorFunction = std::function<Vec(const Vec&)>;

/// Compact box Q = [lower, upper].
class GroundSet {
 public:
  GroundSet(Vec lower, Vec upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  Vec center() const { return 0.5 * (lower_ + upper_); }
  double diameter() const { return (upper_ - lower_).norm(); }

  bool contains(const Vec& x) const;
  /// Componentwise clamp; project(x) == x iff contains(x).
  Vec project(const Vec& x) const;

 private:
  Vec lower_;
  Vec upper_;
};

/// Constraint map G together with the cone K it must land in: G(x) in K.
struct ConeMap {
  VectorFunction map;
  Cone cone;
};

/// Equalities h_i(x) = 0, inequalities g_j(x) <= 0, and/or a cone constraint.
///
/// When both forms are present they encode the same feasible set.
struct ConstraintBlock {
  std::vector<ScalarFunction> equalities;
  std::vector<ScalarFunction> inequalities;
  std::optional<ConeMap> cone_map;

  bool has_scalar_form() const { return !equalities.empty() || !inequalities.empty(); }
  bool has_cone_form() const { return cone_map.has_value(); }
  bool inequality_only() const { return equalities.empty() && !inequalities.empty(); }
};

struct Certificate {
  double f_star;
  Vec x_star;
  double tolerance;
  std::string provenance;
};

/// Derivative bounds on the box, used for certified grid and branch-and-bound searches.
///
/// Lipschitz constants are with respect to the Euclidean norm. Curvature
/// bounds cap |d^2/dx_k^2| along every coordinate direction (for G: the norm
/// of the second partial). Constraint bounds apply to every h_i, g_j and to G.
struct SmoothnessBounds {
  double objective_lipschitz = kInf;
  double objective_curvature = kInf;
  double constraint_lipschitz = kInf;
  double constraint_curvature = kInf;
  /// max over Q of |h_i|, |g_j| and |G|.
  double constraint_magnitude = kInf;
};

struct ProblemSpec {
  std::string name;
  std::string description;
  int dimension = 0;
  ScalarFunction objective;
  ConstraintBlock constraints;
  GroundSet ground;
  std::optional<Certificate> certified;
  std::optional<SmoothnessBounds> bounds;
  /// Whether the optimal value function is known to be lsc at the origin
  /// (zero duality gap for the shipped merit families).
  bool strong_duality = false;
  std::string duality_note;

  int equality_count() const { return static_cast<int>(constraints.equalities.size()); }
  int inequality_count() const { return static_cast<int>(constraints.inequalities.size()); }
  /// Layout size of perturbation vectors: m + l for the scalar form, dim K otherwise.
  int constraint_layout_dim() const;
};

/// Checks the structural invariants of a problem (dimensions, certificate).
void validate_problem(const ProblemSpec& problem);

struct ConstraintValues {
  Vec h;
  Vec g;
  std::optional<Vec> G;
};

ConstraintValues evaluate_constraints(const ProblemSpec& problem, const Vec& x);

/// sum_i |h_i(x)| + sum_j max{0, g_j(x)}.
double infeasibility_l1(const ProblemSpec& problem, const Vec& x);

/// dist(G(x), K).
double infeasibility_cone(const ProblemSpec& problem, const Vec& x);

/// The problem's primary infeasibility measure: l1 when a scalar form exists, cone distance otherwise.
double infeasibility(const ProblemSpec& problem, const Vec& x);

struct OracleResult {
  double f_lower;
  double f_upper;
  /// False when no Lipschitz bound is known; f_lower is then -inf.
  bool lower_certified;
  Vec x_best;
  long long grid_points;
};

/// Exhaustive grid search over Q with spacing <= resolution.
///
/// Among grid points whose infeasibility is at most feasibility_slack, returns
/// the one with the least objective (ties: lowest lexicographic index).
OracleResult brute_force_optimum(const ProblemSpec& problem, double resolution, double feasibility_slack);

struct PerturbationQuery {
  Vec y;
  double resolution;
};

struct PerturbationEstimate {
  double value;
  double lower;
  bool lower_certified;
  Vec x_best;
};

/// Grid estimate of beta(y) = inf{f(x) : x in Q, h(x) = y_h, g(x) <= y_g} (or G(x) - y in K).
PerturbationEstimate perturbation_estimate(const ProblemSpec& problem, const PerturbationQuery& query,
                                           double feasibility_slack);

/// Shipped problems P1..P6 and P5-ineq.
const std::vector<std::string>& library_problem_ids();

/// Throws ConfigurationError("unknown problem ...") for unknown ids.
ProblemSpec library_problem(std::string_view id);

}  // namespace dualscheme
