#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dualscheme/common.hpp"
#include "dualscheme/merit.hpp"
#include "dualscheme/problems.hpp"

namespace dualscheme {

struct SolverOptions {
  /// Maximum merit evaluations per subproblem.
  long long budget = 200000;
  /// Random local-polish starts in addition to the warm start and box centre.
  int multistart = 4;
  /// Throw BudgetError instead of returning a best-effort result.
  bool require_certificate = false;
  /// Relative gap below which refinement stops even if epsilon is smaller.
  double relative_gap_floor = 1e-12;
};

struct SolveRequest {
  const ProblemSpec& problem;
  MeritParam mu;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::optional<Vec> warm_start;
  SolverOptions options;
};

enum class Certification {
  Certified,    // certified_gap <= epsilon
  BestEffort,   // finite certified_gap > epsilon (budget or gap floor reached)
  Uncertified,  // no derivative bound for the merit: certified_gap = +inf
};

const char* to_string(Certification c);

struct SolveResult {
  Vec x;
  double merit_value;
  /// Proven bound on merit_value - inf_Q F(., mu).
  double certified_gap;
  long long evaluations;
  Certification status;
  std::string diagnostic;
};

/// Finds an approximately global minimiser of F(., mu) over the box.
///
/// Local polish (coordinate, diagonal and pattern line searches with Brent's
/// method) from the warm start, the box centre and seeded random points
/// provides the incumbent; a best-first branch-and-bound over a dyadic
/// subdivision of the box certifies it. Box lower bounds use the vertex
/// minimum less the smaller of the Lipschitz allowance L * halfdiag and the
/// multilinear interpolation error sum_k H s_k^2 / 8. Pruning never depends on
/// epsilon, so a smaller epsilon only extends the same search and never
/// returns a larger merit value.
SolveResult solve_subproblem(const SolveRequest& request);

struct DualBracket {
  double lo;
  double hi;
  bool certified;
};

/// Theta(mu) lies in [merit_value - max(epsilon, gap), merit_value]; lo = -inf when uncertified.
DualBracket dual_bracket(const SolveRequest& request, const SolveResult& result);

}  // namespace dualscheme
