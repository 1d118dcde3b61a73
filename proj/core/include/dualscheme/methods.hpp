#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dualscheme/common.hpp"
#include "dualscheme/inner_solver.hpp"
#include "dualscheme/merit.hpp"
#include "dualscheme/problems.hpp"

namespace dualscheme {

/// Tolerances eps_n handed to the inner solver.
class EpsilonSchedule {
 public:
  enum class Kind { Constant, Geometric, Zero };

  static EpsilonSchedule constant(double eps);
  static EpsilonSchedule geometric(double eps0, double ratio);
  static EpsilonSchedule zero() { return EpsilonSchedule(Kind::Zero, 0.0, 0.0); }
  /// "constant:<eps>", "geometric:<eps0>:<ratio>", "zero".
  static EpsilonSchedule parse(std::string_view text);

  double at(int n) const;
  /// eps_n -> 0.
  bool asymptotically_exact() const { return kind_ != Kind::Constant || eps0_ == 0.0; }
  Kind kind() const { return kind_; }
  std::string to_string() const;

 private:
  EpsilonSchedule(Kind kind, double eps0, double ratio) : kind_(kind), eps0_(eps0), ratio_(ratio) {}
  Kind kind_;
  double eps0_;
  double ratio_;
};

/// Step sizes s_n and corrections delta_n of the dual ascent updates.
struct StepRule {
  enum class Kind { Constant, NormDriven };
  /// omega_step for NormDriven: t^2, t or sqrt(t).
  enum class Shape { Square, Linear, Sqrt };

  Kind kind = Kind::Constant;
  double constant_step = 1.0;
  Shape shape = Shape::Square;
  /// delta_n = delta for every n; zero means no correction.
  double delta = 0.0;

  static StepRule constant(double s, double delta = 0.0);
  static StepRule norm_driven(Shape shape, double delta = 0.0);
  /// "constant:<s>", "norm:square", "norm:linear", "norm:sqrt".
  static StepRule parse(std::string_view text, double delta = 0.0);

  /// s_n given |p_n|.
  double step(double p_norm) const;
  std::string to_string() const;
};

struct AlmUpdateRule {
  bool safeguarded = false;
  /// Radius of the ball intersected with the polar cone when safeguarded.
  double radius = 1e6;
  double tau = 0.25;
  double growth = 10.0;
  /// sigma_n at or below this counts as contracted: the inner solver cannot
  /// resolve G(x_n) more finely, so smaller steps carry no information.
  double sigma_floor = 1e-8;
};

struct PenaltyConfig {
  OmegaFunction omega = OmegaFunction::identity();
  double c0 = 1.0;
  StepRule steps;
};

struct WeightedConfig {
  Vec u0;
  Vec v0;
  double w0 = 1.0;
  double w_decay = 0.5;
  StepRule steps;
};

struct AlmConfig {
  Vec lambda0;
  double c0 = 1.0;
  AlmUpdateRule rule;
};

struct PalmConfig {
  Vec lambda0;
  double c0 = 1.0;
  PFunction p = PFunction::hpr();
  /// c_{n+1} = max(floor_n, growth * c_n).
  double growth = 1.0;
  /// Raw initial point; the box centre when absent.
  std::optional<Vec> x0;
};

using MethodConfig = std::variant<PenaltyConfig, WeightedConfig, AlmConfig, PalmConfig>;

/// Throws InputError (ConfigurationError for ALM on a problem without a cone view) when the
/// configuration cannot start a run on this problem.
void validate_method_config(const ProblemSpec& problem, const MethodConfig& config);

/// "penalty", "weighted", "alm-plain", "alm-safeguarded" or "palm".
std::string method_name(const MethodConfig& config);

struct RunOptions {
  int iterations = 30;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

struct IterateRecord {
  int n = 0;
  Vec x;
  MeritParam mu;
  double epsilon = 0.0;
  double f_val = 0.0;
  double phi_val = 0.0;
  double merit_val = 0.0;
  double theta_lo = -kInf;
  double theta_hi = kInf;
  double infeasibility = 0.0;
  double solver_gap = kInf;
  /// Update quantities: p_norm, step, delta, sigma, w as applicable.
  std::map<std::string, double> internals;

  bool operator==(const IterateRecord& o) const;
};

struct Trace {
  std::string method;
  std::string problem;
  std::string schedule;
  std::vector<IterateRecord> records;
  bool aborted = false;
  std::string abort_reason;

  bool operator==(const Trace& o) const = default;
};

/// Next parameter from the record just produced at that parameter. The
/// update may annotate the record's internals.
using ParameterUpdate = std::function<MeritParam(IterateRecord&)>;

/// The generic inexact primal-dual loop.
///
/// Record k solves min F(., mu_k) to eps_{first_index + k}, then
/// mu_{k+1} = update(record). Iteration indices start at first_index. A
/// BudgetError from the inner solver ends the run with aborted set.
Trace run_primal_dual(const ProblemSpec& problem, MeritParam mu0, const EpsilonSchedule& schedule,
                      const RunOptions& options, const ParameterUpdate& update, int first_index = 0,
                      std::optional<Vec> warm_start = std::nullopt);

/// c_{n+1} = c_n + s_n (omega(infeasibility(x_n)) + delta_n).
Trace run_penalty(const ProblemSpec& problem, const PenaltyConfig& config, const EpsilonSchedule& schedule,
                  const RunOptions& options);

/// (u, v)_{n+1} = (u, v)_n + s_n (p_n + delta_n), p_n = (eta(h(x_n), w_n), gamma(g(x_n), w_n)); w_{n+1} = decay w_n.
Trace run_rounded_weighted(const ProblemSpec& problem, const WeightedConfig& config,
                           const EpsilonSchedule& schedule, const RunOptions& options);

/// lambda_{n+1} = Pi_{K*}(lambda_n + c_n G(x_n)) (optionally shrunk into a ball); c grows when the
/// multiplier step sigma_n fails to contract by tau.
Trace run_augmented_lagrangian(const ProblemSpec& problem, const AlmConfig& config,
                               const EpsilonSchedule& schedule, const RunOptions& options);

/// Parameters are updated from x_n before x_{n+1} is computed; x_0 is a raw point, so the
/// trace starts at n = 1.
Trace run_palm(const ProblemSpec& problem, const PalmConfig& config, const EpsilonSchedule& schedule,
               const RunOptions& options);

Trace run_method(const ProblemSpec& problem, const MethodConfig& config, const EpsilonSchedule& schedule,
                 const RunOptions& options);

/// The multiplier/penalty rule pieces, exposed for direct testing.
double alm_sigma(const Cone& cone, const Vec& lambda, double c, const Vec& g_value);
Vec alm_multiplier_update(const Cone& cone, const Vec& lambda, double c, const Vec& g_value,
                          const AlmUpdateRule& rule);
double alm_next_penalty(double c, double sigma, double sigma_prev, const AlmUpdateRule& rule);
double palm_penalty_floor(int n_next, const Vec& lambda_next, const PFunction& p);

}  // namespace dualscheme
