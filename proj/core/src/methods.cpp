#include "dualscheme/methods.hpp"

#include <cmath>

#include "text.hpp"

namespace dualscheme {

using detail::number_text;
using detail::parse_number;

EpsilonSchedule EpsilonSchedule::constant(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InputError("epsilon schedule: constant must be finite and >= 0");
  return EpsilonSchedule(Kind::Constant, eps, 1.0);
}

EpsilonSchedule EpsilonSchedule::geometric(double eps0, double ratio) {
  if (!(eps0 >= 0.0) || !std::isfinite(eps0)) throw InputError("epsilon schedule: eps0 must be finite and >= 0");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("epsilon schedule: ratio must lie in (0, 1)");
  return EpsilonSchedule(Kind::Geometric, eps0, ratio);
}

EpsilonSchedule EpsilonSchedule::parse(std::string_view text) {
  const auto parts = detail::split(text, ':');
  try {
    if (parts[0] == "zero" && parts.size() == 1) return zero();
    if (parts[0] == "constant" && parts.size() == 2) return constant(parse_number(parts[1], "epsilon"));
    if (parts[0] == "geometric" && parts.size() == 3) {
      return geometric(parse_number(parts[1], "epsilon"), parse_number(parts[2], "epsilon ratio"));
    }
  } catch (const InputError& e) {
    throw ConfigurationError(e.what());
  }
  throw ConfigurationError("epsilon schedule: expected zero, constant:<eps> or geometric:<eps0>:<ratio>, got '" +
                           std::string(text) + "'");
}

double EpsilonSchedule::at(int n) const {
  switch (kind_) {
    case Kind::Constant: return eps0_;
    case Kind::Geometric: return eps0_ * std::pow(ratio_, n);
    case Kind::Zero: return 0.0;
  }
  return 0.0;
}

std::string EpsilonSchedule::to_string() const {
  switch (kind_) {
    case Kind::Constant: return "constant:" + number_text(eps0_);
    case Kind::Geometric: return "geometric:" + number_text(eps0_) + ":" + number_text(ratio_);
    case Kind::Zero: return "zero";
  }
  return "?";
}

StepRule StepRule::constant(double s, double delta) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InputError("step rule: constant step must be finite and > 0");
  if (!(delta >= 0.0)) throw InputError("step rule: correction must be >= 0");
  StepRule rule;
  rule.kind = Kind::Constant;
  rule.constant_step = s;
  rule.delta = delta;
  return rule;
}

StepRule StepRule::norm_driven(Shape shape, double delta) {
  if (!(delta >= 0.0)) throw InputError("step rule: correction must be >= 0");
  StepRule rule;
  rule.kind = Kind::NormDriven;
  rule.shape = shape;
  rule.delta = delta;
  return rule;
}

StepRule StepRule::parse(std::string_view text, double delta) {
  const auto parts = detail::split(text, ':');
  try {
    if (parts.size() == 2 && parts[0] == "constant") return constant(parse_number(parts[1], "step"), delta);
    if (parts.size() == 2 && parts[0] == "norm") {
      if (parts[1] == "square") return norm_driven(Shape::Square, delta);
      if (parts[1] == "linear") return norm_driven(Shape::Linear, delta);
      if (parts[1] == "sqrt") return norm_driven(Shape::Sqrt, delta);
    }
  } catch (const InputError& e) {
    throw ConfigurationError(e.what());
  }
  throw ConfigurationError("step rule: expected constant:<s> or norm:square|linear|sqrt, got '" + std::string(text) +
                           "'");
}

double StepRule::step(double p_norm) const {
  if (kind == Kind::Constant) return constant_step;
  switch (shape) {
    case Shape::Square: return p_norm * p_norm;
    case Shape::Linear: return p_norm;
    case Shape::Sqrt: return std::sqrt(p_norm);
  }
  return 0.0;
}

std::string StepRule::to_string() const {
  std::string text;
  if (kind == Kind::Constant) {
    text = "constant:" + number_text(constant_step);
  } else {
    text = shape == Shape::Square ? "norm:square" : shape == Shape::Linear ? "norm:linear" : "norm:sqrt";
  }
  if (delta != 0.0) text += " delta=" + number_text(delta);
  return text;
}

std::string method_name(const MethodConfig& config) {
  struct Visitor {
    std::string operator()(const PenaltyConfig&) const { return "penalty"; }
    std::string operator()(const WeightedConfig&) const { return "weighted"; }
    std::string operator()(const AlmConfig& c) const { return c.rule.safeguarded ? "alm-safeguarded" : "alm-plain"; }
    std::string operator()(const PalmConfig&) const { return "palm"; }
  };
  return std::visit(Visitor{}, config);
}

bool IterateRecord::operator==(const IterateRecord& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return n == o.n && x == o.x && mu == o.mu && same(epsilon, o.epsilon) && same(f_val, o.f_val) &&
         same(phi_val, o.phi_val) && same(merit_val, o.merit_val) && same(theta_lo, o.theta_lo) &&
         same(theta_hi, o.theta_hi) && same(infeasibility, o.infeasibility) && same(solver_gap, o.solver_gap) &&
         internals == o.internals;
}

Trace run_primal_dual(const ProblemSpec& problem, MeritParam mu0, const EpsilonSchedule& schedule,
                      const RunOptions& options, const ParameterUpdate& update, int first_index,
                      std::optional<Vec> warm_start) {
  if (options.iterations < 0) throw InputError("iterations must be >= 0");
  Trace trace;
  trace.method = merit_kind_name(mu0);
  trace.problem = problem.name;
  trace.schedule = schedule.to_string();

  MeritParam mu = std::move(mu0);
  for (int k = 0; k < options.iterations; ++k) {
    const int n = first_index + k;
    SolveRequest request{problem, mu, schedule.at(n), options.seed + static_cast<std::uint64_t>(n), warm_start,
                         options.solver};
    std::optional<SolveResult> solved;
    try {
      solved = solve_subproblem(request);
    } catch (const BudgetError& e) {
      trace.aborted = true;
      trace.abort_reason = "iteration " + std::to_string(n) + ": " + e.what();
      return trace;
    }
    const SolveResult& result = *solved;
    const DualBracket bracket = dual_bracket(request, result);

    const double f_val = problem.objective(result.x);
    const double phi_val = phi(problem, result.x, mu);
    IterateRecord record{.n = n,
                         .x = result.x,
                         .mu = mu,
                         .epsilon = request.epsilon,
                         .f_val = f_val,
                         .phi_val = phi_val,
                         .merit_val = f_val + phi_val,
                         .theta_lo = bracket.lo,
                         .theta_hi = bracket.hi,
                         .infeasibility = infeasibility(problem, result.x),
                         .solver_gap = result.certified_gap,
                         .internals = {}};

    warm_start = result.x;
    mu = update(record);
    trace.records.push_back(std::move(record));
  }
  return trace;
}

namespace {

void require_iterations(const RunOptions& options) {
  if (options.iterations < 1) throw InputError("iterations must be >= 1");
}

Trace finish(Trace trace, std::string method) {
  trace.method = std::move(method);
  return trace;
}

}  // namespace

void validate_method_config(const ProblemSpec& problem, const MethodConfig& config) {
  struct Visitor {
    const ProblemSpec& problem;
    void operator()(const PenaltyConfig& c) const {
      if (!(c.c0 >= 0.0) || !std::isfinite(c.c0)) throw InputError("penalty: c0 must be finite and >= 0");
      validate_merit_param(problem, PenaltyParam{c.c0, c.omega});
    }
    void operator()(const WeightedConfig& c) const {
      if (!(c.w0 > 0.0) || !std::isfinite(c.w0)) throw InputError("weighted penalty: w0 must be finite and > 0");
      if (!(c.w_decay > 0.0 && c.w_decay <= 1.0)) throw InputError("weighted penalty: w_decay must lie in (0, 1]");
      validate_merit_param(problem, WeightedParam{c.u0, c.v0, c.w0});
    }
    void operator()(const AlmConfig& c) const {
      if (!problem.constraints.cone_map) {
        throw ConfigurationError(problem.name + ": augmented Lagrangian needs a cone constraint");
      }
      const AlmUpdateRule& rule = c.rule;
      if (!(rule.tau > 0.0 && rule.tau < 1.0)) throw InputError("augmented Lagrangian: tau must lie in (0, 1)");
      if (!(rule.growth > 1.0)) throw InputError("augmented Lagrangian: growth must exceed 1");
      if (!(rule.sigma_floor >= 0.0)) throw InputError("augmented Lagrangian: sigma_floor must be >= 0");
      if (rule.safeguarded && !(rule.radius > 0.0)) throw InputError("augmented Lagrangian: radius must be positive");
      require_dimension(c.lambda0, problem.constraints.cone_map->cone.dim(), "augmented Lagrangian lambda0");
      validate_merit_param(problem, MultiplierParam{c.lambda0, c.c0});
    }
    void operator()(const PalmConfig& c) const {
      if (!(c.growth >= 1.0)) throw InputError("PALM: growth must be >= 1");
      validate_merit_param(problem, PalmParam{c.lambda0, c.c0, c.p});
      if (c.p.kind() == PFunction::Kind::Exponential && (c.lambda0.array() <= 0.0).any()) {
        throw InputError("PALM: the exponential kernel needs strictly positive initial multipliers");
      }
      if (c.x0) {
        require_dimension(*c.x0, problem.dimension, "PALM x0");
        if (!problem.ground.contains(*c.x0)) throw InputError("PALM: x0 lies outside the box");
      }
    }
  };
  std::visit(Visitor{problem}, config);
}

Trace run_penalty(const ProblemSpec& problem, const PenaltyConfig& config, const EpsilonSchedule& schedule,
                  const RunOptions& options) {
  require_iterations(options);
  validate_method_config(problem, config);
  MeritParam mu0 = PenaltyParam{config.c0, config.omega};

  auto update = [&](IterateRecord& record) -> MeritParam {
    const auto& param = std::get<PenaltyParam>(record.mu);
    const double p = config.omega(record.infeasibility);
    const double s = config.steps.step(std::abs(p));
    record.internals["p"] = p;
    record.internals["step"] = s;
    record.internals["delta"] = config.steps.delta;
    return PenaltyParam{param.c + s * (p + config.steps.delta), param.omega};
  };
  return finish(run_primal_dual(problem, std::move(mu0), schedule, options, update), "penalty");
}

Trace run_rounded_weighted(const ProblemSpec& problem, const WeightedConfig& config,
                           const EpsilonSchedule& schedule, const RunOptions& options) {
  require_iterations(options);
  validate_method_config(problem, config);
  MeritParam mu0 = WeightedParam{config.u0, config.v0, config.w0};

  auto update = [&](IterateRecord& record) -> MeritParam {
    const auto& param = std::get<WeightedParam>(record.mu);
    const ConstraintValues values = evaluate_constraints(problem, record.x);
    Vec pu(values.h.size());
    for (Eigen::Index i = 0; i < values.h.size(); ++i) pu[i] = eta(values.h[i], param.w);
    Vec pv(values.g.size());
    for (Eigen::Index j = 0; j < values.g.size(); ++j) pv[j] = gamma_smooth(values.g[j], param.w);
    const double p_norm = std::sqrt(pu.squaredNorm() + pv.squaredNorm());
    const double s = config.steps.step(p_norm);
    const double delta = config.steps.delta;
    record.internals["p_norm"] = p_norm;
    record.internals["step"] = s;
    record.internals["delta"] = delta;
    record.internals["w"] = param.w;
    return WeightedParam{param.u + s * (pu.array() + delta).matrix(), param.v + s * (pv.array() + delta).matrix(),
                         config.w_decay * param.w};
  };
  return finish(run_primal_dual(problem, std::move(mu0), schedule, options, update), "weighted");
}

double alm_sigma(const Cone& cone, const Vec& lambda, double c, const Vec& g_value) {
  const Vec shifted = project_polar(cone, lambda + c * g_value);
  return (shifted - lambda).norm() / c;
}

Vec alm_multiplier_update(const Cone& cone, const Vec& lambda, double c, const Vec& g_value,
                          const AlmUpdateRule& rule) {
  const Cone dual = polar(cone);
  const Vec trial = lambda + c * g_value;
  const Vec next = rule.safeguarded ? project_onto_bounded(dual, trial, rule.radius) : project(dual, trial);
  // A second projection removes the roundoff of projecting a large trial point.
  return project(dual, next);
}

double alm_next_penalty(double c, double sigma, double sigma_prev, const AlmUpdateRule& rule) {
  return sigma <= rule.tau * sigma_prev || sigma <= rule.sigma_floor ? c : rule.growth * c;
}

Trace run_augmented_lagrangian(const ProblemSpec& problem, const AlmConfig& config,
                               const EpsilonSchedule& schedule, const RunOptions& options) {
  require_iterations(options);
  validate_method_config(problem, config);
  const AlmUpdateRule& rule = config.rule;
  const Cone& cone = problem.constraints.cone_map->cone;
  MeritParam mu0 = MultiplierParam{config.lambda0, config.c0};

  double sigma_prev = kInf;
  auto update = [&](IterateRecord& record) -> MeritParam {
    const auto& param = std::get<MultiplierParam>(record.mu);
    const Vec g_value = problem.constraints.cone_map->map(record.x);
    const double sigma = alm_sigma(cone, param.lambda, param.c, g_value);
    record.internals["sigma"] = sigma;
    MultiplierParam next{alm_multiplier_update(cone, param.lambda, param.c, g_value, rule),
                         alm_next_penalty(param.c, sigma, sigma_prev, rule)};
    sigma_prev = sigma;
    return next;
  };
  return finish(run_primal_dual(problem, std::move(mu0), schedule, options, update), method_name(config));
}

double palm_penalty_floor(int n_next, const Vec& lambda_next, const PFunction& p) {
  double r_sum = 0.0;
  for (Eigen::Index i = 0; i < lambda_next.size(); ++i) r_sum += std::abs(p.r(lambda_next[i]));
  return static_cast<double>(n_next) * std::max(1.0, r_sum);
}

Trace run_palm(const ProblemSpec& problem, const PalmConfig& config, const EpsilonSchedule& schedule,
               const RunOptions& options) {
  require_iterations(options);
  validate_method_config(problem, config);
  const MeritParam mu0 = PalmParam{config.lambda0, config.c0, config.p};
  const Vec x0 = config.x0.value_or(problem.ground.center());

  auto next_param = [&](int n, const Vec& x, const PalmParam& param) {
    const ConstraintValues values = evaluate_constraints(problem, x);
    Vec lambda(param.lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      lambda[i] = p_derivative(param.p, param.c * values.g[i], param.lambda[i]);
    }
    const double c = std::max(palm_penalty_floor(n + 1, lambda, param.p), config.growth * param.c);
    return PalmParam{lambda, c, param.p};
  };

  auto update = [&](IterateRecord& record) -> MeritParam {
    return next_param(record.n, record.x, std::get<PalmParam>(record.mu));
  };
  MeritParam mu1 = next_param(0, x0, std::get<PalmParam>(mu0));
  return finish(run_primal_dual(problem, std::move(mu1), schedule, options, update, 1, x0), "palm");
}

Trace run_method(const ProblemSpec& problem, const MethodConfig& config, const EpsilonSchedule& schedule,
                 const RunOptions& options) {
  struct Visitor {
    const ProblemSpec& problem;
    const EpsilonSchedule& schedule;
    const RunOptions& options;
    Trace operator()(const PenaltyConfig& c) const { return run_penalty(problem, c, schedule, options); }
    Trace operator()(const WeightedConfig& c) const { return run_rounded_weighted(problem, c, schedule, options); }
    Trace operator()(const AlmConfig& c) const { return run_augmented_lagrangian(problem, c, schedule, options); }
    Trace operator()(const PalmConfig& c) const { return run_palm(problem, c, schedule, options); }
  };
  return std::visit(Visitor{problem, schedule, options}, config);
}

}  // namespace dualscheme
