#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualscheme/methods.hpp"
#include "dualscheme/problems.hpp"

namespace dualscheme {

enum class Verdict { Pass, Fail, NotApplicable };

const char* to_string(Verdict v);

/// One monitored conclusion.
///
/// slack is the signed margin of the tightest comparison: nonnegative on
/// pass, negative on fail, NaN when not applicable.
struct CheckResult {
  std::string check;
  std::string citation;
  Verdict verdict = Verdict::NotApplicable;
  double slack = 0.0;
  int window = 0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckConfig {
  /// Number of final records standing in for limits.
  int tail_window = 5;
  double tolerance = 1e-3;
};

/// limsup eps_n estimated as the maximum over the tail window.
double tail_eps_star(const Trace& trace, int window);

/// theta_hi_n <= f_star + tolerance (+ solver gap when requested) at every record.
CheckResult check_weak_duality(const Trace& trace, double f_star, double tolerance, bool allow_solver_gap = false);

/// Tail-window sandwich on f, F, the dual brackets, phi and infeasibility. Throws InputError
/// when the trace is shorter than the window.
std::vector<CheckResult> check_universal_conclusions(const Trace& trace, double f_star, const CheckConfig& config);

/// Tail limits equal to f_star within tolerance. Not applicable unless the trace's epsilon
/// schedule tends to zero.
std::vector<CheckResult> check_asymptotic(const Trace& trace, double f_star, const CheckConfig& config);

struct PhiWitness {
  CheckResult check;
  /// Largest t_n found by bisection, one per record.
  std::vector<double> t;
};

/// Builds the family-specific tolerance sequence t_n that forces phi <= O(1/n) on t_n-feasible points.
PhiWitness check_phi_convergence_evidence(const Trace& trace);

enum class ExactnessClass { Bounded, Unbounded, Inconclusive, NotApplicable };

const char* to_string(ExactnessClass c);
/// "bounded", "unbounded", "inconclusive"; anything else throws ConfigurationError.
ExactnessClass parse_exactness_class(std::string_view text);

struct ExactnessReport {
  ExactnessClass classification = ExactnessClass::NotApplicable;
  CheckResult check;
};

/// Classifies penalty growth in a penalty or weighted trace.
///
/// Bounded: the tail stays below threshold_c with relative change at most the
/// tolerance. Unbounded: the penalty exceeds threshold_c while infeasibility
/// decays, or keeps growing over the tail while the iterates stay infeasible.
/// The verdict passes when the class matches `expected`, or when it is
/// conclusive and nothing was expected.
ExactnessReport detect_exactness(const Trace& trace, double threshold_c, const CheckConfig& config,
                                 std::optional<ExactnessClass> expected = std::nullopt);

/// Which hypothesis set an augmented Lagrangian run rests on, and whether it holds on the tail:
/// c bounded needs sigma_n -> 0 and bounded multipliers; c unbounded needs |lambda_n| / sqrt(c_n) -> 0.
CheckResult check_alm_regime(const Trace& trace, const CheckConfig& config);

/// PALM side conditions: f(x_n) bounded below, lambda_n >= 0, c_n >= n.
CheckResult check_palm_hypotheses(const Trace& trace);

struct ConvergenceReport {
  std::string method;
  std::string problem;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  int passed() const;
  int failed() const;
  int total() const { return static_cast<int>(checks.size()); }
};

struct MonitorConfig {
  CheckConfig check;
  std::optional<double> exactness_threshold;
  std::optional<ExactnessClass> expected_exactness;
  /// Grid estimates of the optimal value function near the origin (notes only).
  bool lsc_spot_check = false;
};

/// Runs every check that applies to the trace's method. Requires a certified problem.
ConvergenceReport run_monitor(const Trace& trace, const ProblemSpec& problem, const MonitorConfig& config);

}  // namespace dualscheme
