#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "dualscheme/common.hpp"
#include "dualscheme/problems.hpp"

namespace dualscheme {

/// Rounded absolute value: t^2/(2w) on |t| < w, |t| - w/2 otherwise; eta(t, 0) = |t|.
double eta(double t, double w);

/// Rounded max{0, t}: 0 for t <= 0, t^2/(2w) on (0, w), t - w/2 beyond; gamma(t, 0) = max{0, t}.
double gamma_smooth(double t, double w);

/// d eta / dt. At w = 0 the one-sided choice sign(t) (0 at t = 0) is returned.
double eta_derivative(double t, double w);
double gamma_smooth_derivative(double t, double w);

/// Increasing scalar omega with omega(0) = 0 applied to the infeasibility in the penalty merit.
class OmegaFunction {
 public:
  enum class Kind { Identity, Power, BarrierLog };

  static OmegaFunction identity() { return OmegaFunction(Kind::Identity, 1.0); }
  static OmegaFunction power(double p);
  /// omega(t) = -log(1 - t/tau) on [0, tau), +inf beyond.
  static OmegaFunction barrier_log(double tau);
  /// "identity", "power:<p>", "barrierlog:<tau>".
  static OmegaFunction parse(std::string_view text);

  double operator()(double t) const;
  /// +inf for Identity and Power.
  double tau() const { return kind_ == Kind::BarrierLog ? param_ : kInf; }
  Kind kind() const { return kind_; }
  double param() const { return param_; }
  /// Bound on omega' over [0, t_max]; +inf when none exists.
  double derivative_bound(double t_max) const;
  std::string to_string() const;

  bool operator==(const OmegaFunction&) const = default;

 private:
  OmegaFunction(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

/// The kernel P(s, t) of a P-type augmented Lagrangian.
///
/// Hpr:          P(s, t) = t s + s^2/2 for s >= -t, -t^2/2 otherwise; r(t) = -t^2/2.
/// Exponential:  P(s, t) = t (e^s - 1);                                r(t) = -t.
/// Both have a = +inf. The exponential kernel violates P(s, 0)/s -> inf, so
/// runs with it need strictly positive initial multipliers.
class PFunction {
 public:
  enum class Kind { Hpr, Exponential };

  static PFunction hpr() { return PFunction(Kind::Hpr); }
  static PFunction exponential() { return PFunction(Kind::Exponential); }
  /// "hpr" or "exp".
  static PFunction parse(std::string_view text);

  double operator()(double s, double t) const;
  double r(double t) const;
  double a() const { return kInf; }
  Kind kind() const { return kind_; }
  std::string to_string() const;

  bool operator==(const PFunction&) const = default;

 private:
  explicit PFunction(Kind kind) : kind_(kind) {}
  Kind kind_;
};

/// dP/ds; throws DomainError when s >= a.
double p_derivative(const PFunction& p, double s, double t);

struct PenaltyParam {
  double c;
  OmegaFunction omega;
  bool operator==(const PenaltyParam&) const = default;
};

struct WeightedParam {
  Vec u;
  Vec v;
  double w;
  bool operator==(const WeightedParam& o) const { return u == o.u && v == o.v && w == o.w; }
};

/// Multiplier/penalty pair for the cone augmented Lagrangian; lambda lies in the polar of the problem's cone.
struct MultiplierParam {
  Vec lambda;
  double c;
  bool operator==(const MultiplierParam& o) const { return lambda == o.lambda && c == o.c; }
};

struct PalmParam {
  Vec lambda;
  double c;
  PFunction p;
  bool operator==(const PalmParam& o) const { return lambda == o.lambda && c == o.c && p == o.p; }
};

using MeritParam = std::variant<PenaltyParam, WeightedParam, MultiplierParam, PalmParam>;

std::string merit_kind_name(const MeritParam& mu);

/// c * omega(infeasibility(x)); +inf when the infeasibility reaches tau.
double phi_penalty(const ProblemSpec& problem, const Vec& x, double c, const OmegaFunction& omega);

/// sum_i u_i eta(h_i(x), w) + sum_j v_j gamma(g_j(x), w).
double phi_weighted(const ProblemSpec& problem, const Vec& x, const Vec& u, const Vec& v, double w);

/// (1/2c) [ |Pi_{K*}(lambda + c G(x))|^2 - |lambda|^2 ]. Throws InputError if lambda is not in K*.
double phi_hpr(const ProblemSpec& problem, const Vec& x, const Vec& lambda, double c);

/// The two algebraic forms of the cone augmented Lagrangian term for a given G value.
double hpr_term_projection_form(const Cone& cone, const Vec& lambda, double c, const Vec& g_value);
double hpr_term_distance_form(const Cone& cone, const Vec& lambda, double c, const Vec& g_value);

/// (1/c) sum_i P(c g_i(x), lambda_i), +inf if some c g_i(x) >= a.
double phi_palm(const ProblemSpec& problem, const Vec& x, const Vec& lambda, double c, const PFunction& p);

/// Throws ConfigurationError when the merit kind does not fit the problem's
/// constraint form, InputError when parameters leave their domain.
void validate_merit_param(const ProblemSpec& problem, const MeritParam& mu);

/// phi(x, mu) dispatched on the parameter kind. No parameter validation.
double phi(const ProblemSpec& problem, const Vec& x, const MeritParam& mu);

/// F(x, mu) = f(x) + phi(x, mu).
double merit_eval(const ProblemSpec& problem, const Vec& x, const MeritParam& mu);

/// Derivative bounds for x -> F(x, mu) on the box, assembled from the
/// problem's SmoothnessBounds and the parameter. Missing entries mean no
/// bound could be derived.
struct MeritBounds {
  std::optional<double> lipschitz;
  std::optional<double> curvature;
};

MeritBounds merit_bounds(const ProblemSpec& problem, const MeritParam& mu);

}  // namespace dualscheme
