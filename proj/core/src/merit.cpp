#include "dualscheme/merit.hpp"

#include "text.hpp"

#include <charconv>
#include <cmath>

namespace dualscheme {

double eta(double t, double w) {
  if (w < 0.0) throw InputError("eta: smoothing parameter must be nonnegative");
  const double a = std::abs(t);
  if (w == 0.0) return a;
  return a < w ? t * t / (2.0 * w) : a - 0.5 * w;
}

double gamma_smooth(double t, double w) {
  if (w < 0.0) throw InputError("gamma: smoothing parameter must be nonnegative");
  if (t <= 0.0) return 0.0;
  if (w == 0.0) return t;
  return t < w ? t * t / (2.0 * w) : t - 0.5 * w;
}

double eta_derivative(double t, double w) {
  if (w > 0.0 && std::abs(t) < w) return t / w;
  return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
}

double gamma_smooth_derivative(double t, double w) {
  if (t <= 0.0) return 0.0;
  if (w > 0.0 && t < w) return t / w;
  return 1.0;
}

// ---------------------------------------------------------------------------

using detail::number_text;
using detail::parse_number;

OmegaFunction OmegaFunction::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("omega power: need p >= 1");
  return OmegaFunction(Kind::Power, p);
}

OmegaFunction OmegaFunction::barrier_log(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("omega barrierlog: need finite tau > 0");
  return OmegaFunction(Kind::BarrierLog, tau);
}

OmegaFunction OmegaFunction::parse(std::string_view text) {
  if (text == "identity") return identity();
  const std::size_t colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  if (colon == std::string_view::npos) throw ConfigurationError("omega: unknown function '" + std::string(text) + "'");
  const double value = parse_number(text.substr(colon + 1), "omega");
  try {
    if (name == "power") return power(value);
    if (name == "barrierlog") return barrier_log(value);
  } catch (const InputError& e) {
    throw ConfigurationError(e.what());
  }
  throw ConfigurationError("omega: unknown function '" + std::string(text) + "'");
}

double OmegaFunction::operator()(double t) const {
  if (t == kInf) return kInf;
  switch (kind_) {
    case Kind::Identity: return t;
    case Kind::Power: return std::pow(t, param_);
    case Kind::BarrierLog: return t >= param_ ? kInf : -std::log1p(-t / param_);
  }
  return kInf;
}

double OmegaFunction::derivative_bound(double t_max) const {
  switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::Power: return param_ * std::pow(std::max(t_max, 0.0), param_ - 1.0);
    case Kind::BarrierLog: return t_max < param_ ? 1.0 / (param_ - t_max) : kInf;
  }
  return kInf;
}

std::string OmegaFunction::to_string() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Power: return "power:" + number_text(param_);
    case Kind::BarrierLog: return "barrierlog:" + number_text(param_);
  }
  return "?";
}

PFunction PFunction::parse(std::string_view text) {
  if (text == "hpr") return hpr();
  if (text == "exp") return exponential();
  throw ConfigurationError("P function: unknown kind '" + std::string(text) + "'");
}

double PFunction::operator()(double s, double t) const {
  switch (kind_) {
    case Kind::Hpr: return s >= -t ? t * s + 0.5 * s * s : -0.5 * t * t;
    case Kind::Exponential: return t * std::expm1(s);
  }
  return kInf;
}

double PFunction::r(double t) const {
  switch (kind_) {
    case Kind::Hpr: return -0.5 * t * t;
    case Kind::Exponential: return -t;
  }
  return -kInf;
}

std::string PFunction::to_string() const { return kind_ == Kind::Hpr ? "hpr" : "exp"; }

double p_derivative(const PFunction& p, double s, double t) {
  if (s >= p.a()) throw DomainError("P derivative: s >= a");
  switch (p.kind()) {
    case PFunction::Kind::Hpr: return std::max(0.0, t + s);
    case PFunction::Kind::Exponential: return t * std::exp(s);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

std::string merit_kind_name(const MeritParam& mu) {
  static constexpr const char* kNames[] = {"penalty", "weighted", "hpr", "palm"};
  return kNames[mu.index()];
}

double phi_penalty(const ProblemSpec& problem, const Vec& x, double c, const OmegaFunction& omega) {
  if (c < 0.0) throw InputError("penalty: c must be nonnegative");
  const double t = infeasibility(problem, x);
  const double w = omega(t);
  if (w == kInf) return kInf;
  return c * w;
}

double phi_weighted(const ProblemSpec& problem, const Vec& x, const Vec& u, const Vec& v, double w) {
  const ConstraintBlock& block = problem.constraints;
  require_dimension(u, static_cast<Eigen::Index>(block.equalities.size()), "weighted penalty u");
  require_dimension(v, static_cast<Eigen::Index>(block.inequalities.size()), "weighted penalty v");
  double total = 0.0;
  for (std::size_t i = 0; i < block.equalities.size(); ++i) {
    const double ui = u[static_cast<Eigen::Index>(i)];
    if (ui != 0.0) total += ui * eta(block.equalities[i](x), w);
  }
  for (std::size_t j = 0; j < block.inequalities.size(); ++j) {
    const double vj = v[static_cast<Eigen::Index>(j)];
    if (vj != 0.0) total += vj * gamma_smooth(block.inequalities[j](x), w);
  }
  return total;
}

double hpr_term_projection_form(const Cone& cone, const Vec& lambda, double c, const Vec& g_value) {
  const Vec shifted = lambda + c * g_value;
  return (project_polar(cone, shifted).squaredNorm() - lambda.squaredNorm()) / (2.0 * c);
}

double hpr_term_distance_form(const Cone& cone, const Vec& lambda, double c, const Vec& g_value) {
  const double d = distance(cone, lambda + c * g_value);
  return (d * d - lambda.squaredNorm()) / (2.0 * c);
}

namespace {

constexpr double kPolarTolerance = 1e-9;

void require_in_polar(const Cone& cone, const Vec& lambda) {
  require_dimension(lambda, cone.dim(), "multiplier");
  const double d = distance(polar(cone), lambda);
  if (d > kPolarTolerance * std::max(1.0, lambda.norm())) {
    throw InputError("multiplier is not in the polar cone (distance " + detail::number_text(d) + ", norm " + detail::number_text(lambda.norm()) + ")");
  }
}

double phi_hpr_unchecked(const ProblemSpec& problem, const Vec& x, const Vec& lambda, double c) {
  const ConeMap& cm = *problem.constraints.cone_map;
  return hpr_term_projection_form(cm.cone, lambda, c, cm.map(x));
}

double phi_palm_unchecked(const ProblemSpec& problem, const Vec& x, const Vec& lambda, double c, const PFunction& p) {
  const auto& ineq = problem.constraints.inequalities;
  double total = 0.0;
  for (std::size_t i = 0; i < ineq.size(); ++i) {
    const double s = c * ineq[i](x);
    if (s >= p.a()) return kInf;
    total += p(s, lambda[static_cast<Eigen::Index>(i)]);
  }
  return total / c;
}

}  // namespace

double phi_hpr(const ProblemSpec& problem, const Vec& x, const Vec& lambda, double c) {
  if (!problem.constraints.cone_map) throw ConfigurationError(problem.name + ": augmented Lagrangian needs a cone constraint");
  if (!(c > 0.0)) throw InputError("augmented Lagrangian: c must be positive");
  require_in_polar(problem.constraints.cone_map->cone, lambda);
  return phi_hpr_unchecked(problem, x, lambda, c);
}

double phi_palm(const ProblemSpec& problem, const Vec& x, const Vec& lambda, double c, const PFunction& p) {
  if (!(c > 0.0)) throw InputError("PALM: c must be positive");
  require_dimension(lambda, problem.inequality_count(), "PALM multiplier");
  if ((lambda.array() < 0.0).any()) throw InputError("PALM: multipliers must be nonnegative");
  return phi_palm_unchecked(problem, x, lambda, c, p);
}

void validate_merit_param(const ProblemSpec& problem, const MeritParam& mu) {
  std::visit(
      [&](const auto& param) {
        using T = std::decay_t<decltype(param)>;
        if constexpr (std::is_same_v<T, PenaltyParam>) {
          if (!(param.c >= 0.0)) throw InputError("penalty: c must be nonnegative");
        } else if constexpr (std::is_same_v<T, WeightedParam>) {
          if (!problem.constraints.has_scalar_form()) {
            throw ConfigurationError(problem.name + ": weighted penalty needs equality/inequality constraints");
          }
          require_dimension(param.u, problem.equality_count(), "weighted penalty u");
          require_dimension(param.v, problem.inequality_count(), "weighted penalty v");
          if ((param.u.array() < 0.0).any() || (param.v.array() < 0.0).any() || !(param.w >= 0.0)) {
            throw InputError("weighted penalty: u, v, w must be nonnegative");
          }
        } else if constexpr (std::is_same_v<T, MultiplierParam>) {
          if (!problem.constraints.cone_map) {
            throw ConfigurationError(problem.name + ": augmented Lagrangian needs a cone constraint");
          }
          if (!(param.c > 0.0)) throw InputError("augmented Lagrangian: c must be positive");
          require_in_polar(problem.constraints.cone_map->cone, param.lambda);
        } else {
          if (!problem.constraints.inequality_only()) {
            throw ConfigurationError(problem.name + ": PALM needs an inequality-only problem");
          }
          if (!(param.c > 0.0)) throw InputError("PALM: c must be positive");
          require_dimension(param.lambda, problem.inequality_count(), "PALM multiplier");
          if ((param.lambda.array() < 0.0).any()) throw InputError("PALM: multipliers must be nonnegative");
        }
      },
      mu);
}

double phi(const ProblemSpec& problem, const Vec& x, const MeritParam& mu) {
  return std::visit(
      [&](const auto& param) -> double {
        using T = std::decay_t<decltype(param)>;
        if constexpr (std::is_same_v<T, PenaltyParam>) {
          return phi_penalty(problem, x, param.c, param.omega);
        } else if constexpr (std::is_same_v<T, WeightedParam>) {
          return phi_weighted(problem, x, param.u, param.v, param.w);
        } else if constexpr (std::is_same_v<T, MultiplierParam>) {
          return phi_hpr_unchecked(problem, x, param.lambda, param.c);
        } else {
          return phi_palm_unchecked(problem, x, param.lambda, param.c, param.p);
        }
      },
      mu);
}

double merit_eval(const ProblemSpec& problem, const Vec& x, const MeritParam& mu) {
  const double f = problem.objective(x);
  const double p = phi(problem, x, mu);
  return f + p;
}

MeritBounds merit_bounds(const ProblemSpec& problem, const MeritParam& mu) {
  MeritBounds out;
  if (!problem.bounds) return out;
  const SmoothnessBounds& b = *problem.bounds;
  const double lc = b.constraint_lipschitz;
  const double hc = b.constraint_curvature;
  const double mag = b.constraint_magnitude;

  double phi_lip = kInf;
  double phi_curv = kInf;
  std::visit(
      [&](const auto& param) {
        using T = std::decay_t<decltype(param)>;
        if constexpr (std::is_same_v<T, PenaltyParam>) {
          // Lipschitz only: the l1 measure and cone distance are not differentiable.
          const bool scalar = problem.constraints.has_scalar_form();
          const double count = scalar ? problem.equality_count() + problem.inequality_count() : 1.0;
          const double infeas_lip = count * lc;
          const double infeas_max = count * mag;
          const double omega_lip = param.omega.derivative_bound(infeas_max);
          phi_lip = param.c == 0.0 ? 0.0 : param.c * omega_lip * infeas_lip;
        } else if constexpr (std::is_same_v<T, WeightedParam>) {
          const double weight = param.u.sum() + param.v.sum();
          if (weight == 0.0) {
            phi_lip = 0.0;
            phi_curv = 0.0;
          } else {
            phi_lip = weight * lc;
            if (param.w > 0.0) phi_curv = weight * (lc * lc / param.w + hc);
          }
        } else if constexpr (std::is_same_v<T, MultiplierParam>) {
          // |grad phi| <= |Pi_{K*}(lambda + c G)| L_G <= (|lambda| + c M) L_G,
          // and the directional derivative Pi_{K*}(lambda + c G) . dG is
          // Lipschitz with constant c L_G^2 + (|lambda| + c M) H_G.
          const double reach = param.lambda.norm() + param.c * mag;
          phi_lip = reach * lc;
          phi_curv = param.c * lc * lc + reach * hc;
        } else {
          double lip = 0.0;
          double curv = 0.0;
          for (Eigen::Index i = 0; i < param.lambda.size(); ++i) {
            const double t = param.lambda[i];
            double slope;
            double bend;
            if (param.p.kind() == PFunction::Kind::Hpr) {
              slope = t + param.c * mag;  // P'_s <= max(0, t + s), s <= c M
              bend = 1.0;                 // P''_ss <= 1
            } else {
              slope = t * std::exp(param.c * mag);
              bend = slope;
            }
            lip += slope * lc;
            curv += param.c * bend * lc * lc + slope * hc;
          }
          phi_lip = lip;
          phi_curv = curv;
        }
      },
      mu);

  const double lip = b.objective_lipschitz + phi_lip;
  const double curv = b.objective_curvature + phi_curv;
  if (std::isfinite(lip)) out.lipschitz = lip;
  if (std::isfinite(curv)) out.curvature = curv;
  return out;
}

}  // namespace dualscheme
