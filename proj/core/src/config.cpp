#include "dualscheme/config.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "dualscheme/expression.hpp"
#include "text.hpp"

namespace dualscheme {

using detail::trim;

IniDocument IniDocument::parse(std::string_view text) {
  IniDocument doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigurationError("line " + std::to_string(line_no) + ": unterminated section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigurationError("line " + std::to_string(line_no) + ": empty section name");
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigurationError("line " + std::to_string(line_no) + ": expected key = value");
      }
      if (section.empty()) {
        throw ConfigurationError("line " + std::to_string(line_no) + ": key outside of any section");
      }
      std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw ConfigurationError("line " + std::to_string(line_no) + ": empty key");
      doc.entries_.push_back({section, std::move(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    if (end == text.size()) break;
  }
  return doc;
}

namespace {

using Entry = IniDocument::Entry;

// Entries of one section, with single/repeated access and unknown-key detection.
class Section {
 public:
  Section(std::string name, std::vector<const Entry*> entries) : name_(std::move(name)), entries_(std::move(entries)) {}

  const Entry* find(std::string_view key) {
    const Entry* found = nullptr;
    for (const Entry* e : entries_) {
      if (e->key != key) continue;
      if (found) throw error(*e, "duplicate key '" + std::string(key) + "'");
      found = e;
    }
    used_.insert(std::string(key));
    return found;
  }

  std::vector<const Entry*> all(std::string_view key) {
    std::vector<const Entry*> out;
    for (const Entry* e : entries_) {
      if (e->key == key) out.push_back(e);
    }
    used_.insert(std::string(key));
    return out;
  }

  std::optional<std::string> text(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> number(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return guarded(*e, [&] { return detail::parse_number(e->value, e->key); });
  }

  std::optional<long long> integer(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const std::string_view v = e->value;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
      throw error(*e, "expected an integer, got '" + e->value + "'");
    }
    return value;
  }

  std::optional<bool> boolean(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw error(*e, "expected true or false, got '" + e->value + "'");
  }

  std::optional<Vec> vector(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto parts = detail::split(e->value, ',');
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = guarded(*e, [&] { return detail::parse_number(parts[i], e->key); });
    }
    return v;
  }

  /// Runs fn, re-raising library errors with the entry's line.
  template <class Fn>
  auto guarded(const Entry& e, Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const Error& err) {
      throw error(e, err.what());
    }
  }

  ConfigurationError error(const Entry& e, const std::string& message) const {
    return ConfigurationError("line " + std::to_string(e.line) + " [" + name_ + "] " + e.key + ": " + message);
  }

  void reject_unknown() const {
    for (const Entry* e : entries_) {
      if (!used_.count(e->key)) throw error(*e, "unknown key");
    }
  }

  bool has(std::string_view key) const {
    for (const Entry* e : entries_) {
      if (e->key == key) return true;
    }
    return false;
  }

 private:
  std::string name_;
  std::vector<const Entry*> entries_;
  std::set<std::string> used_;
};

class Sections {
 public:
  explicit Sections(const IniDocument& doc) {
    static const std::set<std::string> known = {"problem", "method", "epsilon", "run", "monitor", "solver"};
    for (const Entry& e : doc.entries()) {
      if (!known.count(e.section)) {
        throw ConfigurationError("line " + std::to_string(e.line) + ": unknown section [" + e.section + "]");
      }
      grouped_[e.section].push_back(&e);
    }
  }

  Section get(const std::string& name) const {
    auto it = grouped_.find(name);
    return Section(name, it == grouped_.end() ? std::vector<const Entry*>{} : it->second);
  }

 private:
  std::map<std::string, std::vector<const Entry*>> grouped_;
};

ProblemSpec inline_problem(Section& s, const std::string& fallback_name) {
  const auto dim_value = s.integer("dimension");
  if (!dim_value || *dim_value <= 0 || *dim_value > 16) {
    throw ConfigurationError("[problem] needs either id or a dimension between 1 and 16");
  }
  const int dim = static_cast<int>(*dim_value);
  auto expr = [&](const Entry& e) { return s.guarded(e, [&] { return Expression::parse(e.value, dim); }); };

  const Entry* objective = s.find("objective");
  if (!objective) throw ConfigurationError("[problem] inline definition needs an objective");
  const Expression f = expr(*objective);

  ConstraintBlock constraints;
  for (const Entry* e : s.all("equality")) {
    const Expression h = expr(*e);
    constraints.equalities.push_back([h](const Vec& x) { return h(x); });
  }
  for (const Entry* e : s.all("inequality")) {
    const Expression g = expr(*e);
    constraints.inequalities.push_back([g](const Vec& x) { return g(x); });
  }

  const Entry* map_entry = s.find("cone_map");
  const Entry* cone_entry = s.find("cone");
  if (static_cast<bool>(map_entry) != static_cast<bool>(cone_entry)) {
    throw ConfigurationError("[problem] cone_map and cone must be given together");
  }
  if (map_entry) {
    std::vector<Expression> parts;
    for (const std::string& piece : split_expression_list(map_entry->value)) {
      parts.push_back(s.guarded(*map_entry, [&] { return Expression::parse(piece, dim); }));
    }
    const Cone cone = s.guarded(*cone_entry, [&] { return Cone::parse(cone_entry->value); });
    constraints.cone_map = ConeMap{[parts](const Vec& x) {
                                     Vec out(static_cast<Eigen::Index>(parts.size()));
                                     for (std::size_t i = 0; i < parts.size(); ++i) {
                                       out[static_cast<Eigen::Index>(i)] = parts[i](x);
                                     }
                                     return out;
                                   },
                                   cone};
  } else if (constraints.has_scalar_form()) {
    // Cone view of the scalar block: (h, g) in {0}^m x R^l_-.
    std::vector<Cone> factors;
    if (!constraints.equalities.empty()) factors.push_back(Cone::zero(static_cast<int>(constraints.equalities.size())));
    if (!constraints.inequalities.empty()) {
      factors.push_back(Cone::nonpositive_orthant(static_cast<int>(constraints.inequalities.size())));
    }
    const auto eqs = constraints.equalities;
    const auto ineqs = constraints.inequalities;
    constraints.cone_map = ConeMap{[eqs, ineqs](const Vec& x) {
                                     Vec out(static_cast<Eigen::Index>(eqs.size() + ineqs.size()));
                                     Eigen::Index k = 0;
                                     for (const auto& h : eqs) out[k++] = h(x);
                                     for (const auto& g : ineqs) out[k++] = g(x);
                                     return out;
                                   },
                                   Cone::product(factors)};
  }

  const auto lower = s.vector("lower");
  const auto upper = s.vector("upper");
  if (!lower || !upper) throw ConfigurationError("[problem] inline definition needs lower and upper");
  GroundSet ground = [&] {
    try {
      return GroundSet(*lower, *upper);
    } catch (const Error& e) {
      throw ConfigurationError(std::string("[problem] ") + e.what());
    }
  }();
  if (ground.dim() != dim) throw ConfigurationError("[problem] lower/upper length does not match dimension");

  std::optional<Certificate> certified;
  const auto f_star = s.number("f_star");
  const auto x_star = s.vector("x_star");
  const double cert_tol = s.number("certificate_tolerance").value_or(1e-9);
  if (f_star && !x_star) throw ConfigurationError("[problem] f_star needs x_star");
  if (x_star && !f_star) throw ConfigurationError("[problem] x_star needs f_star");
  if (f_star) certified = Certificate{*f_star, *x_star, cert_tol, "configuration"};

  std::optional<SmoothnessBounds> bounds;
  SmoothnessBounds b;
  bool any_bound = false;
  auto bound = [&](const char* key, double& slot) {
    if (auto v = s.number(key)) {
      slot = *v;
      any_bound = true;
    }
  };
  bound("objective_lipschitz", b.objective_lipschitz);
  bound("objective_curvature", b.objective_curvature);
  bound("constraint_lipschitz", b.constraint_lipschitz);
  bound("constraint_curvature", b.constraint_curvature);
  bound("constraint_magnitude", b.constraint_magnitude);
  if (any_bound) bounds = b;

  const std::string name = s.text("name").value_or(fallback_name);
  ProblemSpec problem{
      .name = name,
      .description = s.text("description").value_or("inline problem " + name),
      .dimension = dim,
      .objective = [f](const Vec& x) { return f(x); },
      .constraints = std::move(constraints),
      .ground = std::move(ground),
      .certified = std::move(certified),
      .bounds = bounds,
      .strong_duality = s.boolean("strong_duality").value_or(false),
      .duality_note = "",
  };
  try {
    validate_problem(problem);
  } catch (const InputError& e) {
    throw ConfigurationError(std::string("[problem] ") + e.what());
  }
  return problem;
}

ProblemSpec build_problem(Section& s, const std::string& fallback_name) {
  if (const auto id = s.text("id")) {
    for (const char* key : {"dimension", "objective", "equality", "inequality", "lower", "upper", "cone_map", "cone"}) {
      if (s.has(key)) throw ConfigurationError(std::string("[problem] id cannot be combined with ") + key);
    }
    return library_problem(*id);
  }
  return inline_problem(s, fallback_name);
}

StepRule build_steps(Section& s) {
  const double delta = s.number("delta").value_or(0.0);
  const std::string step = s.text("step").value_or("constant:1");
  return StepRule::parse(step, delta);
}

Vec vector_or(Section& s, const char* key, Eigen::Index dim, double fill) {
  if (auto v = s.vector(key)) return *v;
  return Vec::Constant(dim, fill);
}

MethodConfig build_method(Section& s, const ProblemSpec& problem) {
  const auto name = s.text("name");
  if (!name) throw ConfigurationError("[method] missing name");
  try {
    if (*name == "penalty") {
      PenaltyConfig c;
      if (auto omega = s.text("omega")) c.omega = OmegaFunction::parse(*omega);
      c.c0 = s.number("c0").value_or(1.0);
      c.steps = build_steps(s);
      return c;
    }
    if (*name == "weighted") {
      WeightedConfig c;
      c.u0 = vector_or(s, "u0", problem.equality_count(), 1.0);
      c.v0 = vector_or(s, "v0", problem.inequality_count(), 1.0);
      c.w0 = s.number("w0").value_or(1.0);
      c.w_decay = s.number("w_decay").value_or(0.5);
      c.steps = build_steps(s);
      return c;
    }
    if (*name == "alm") {
      AlmConfig c;
      const Eigen::Index k = problem.constraints.cone_map ? problem.constraints.cone_map->cone.dim() : 0;
      c.lambda0 = vector_or(s, "lambda0", k, 0.0);
      c.c0 = s.number("c0").value_or(1.0);
      const std::string multiplier = s.text("multiplier").value_or("plain");
      if (multiplier != "plain" && multiplier != "safeguarded") {
        throw ConfigurationError("[method] multiplier must be plain or safeguarded");
      }
      c.rule.safeguarded = multiplier == "safeguarded";
      c.rule.radius = s.number("radius").value_or(c.rule.radius);
      c.rule.tau = s.number("tau").value_or(c.rule.tau);
      c.rule.growth = s.number("growth").value_or(c.rule.growth);
      c.rule.sigma_floor = s.number("sigma_floor").value_or(c.rule.sigma_floor);
      return c;
    }
    if (*name == "palm") {
      PalmConfig c;
      c.lambda0 = vector_or(s, "lambda0", problem.inequality_count(), 0.0);
      c.c0 = s.number("c0").value_or(1.0);
      if (auto p = s.text("p")) c.p = PFunction::parse(*p);
      c.growth = s.number("growth").value_or(1.0);
      c.x0 = s.vector("x0");
      return c;
    }
  } catch (const InputError& e) {
    throw ConfigurationError(std::string("[method] ") + e.what());
  }
  throw ConfigurationError("[method] unknown method '" + *name + "' (expected penalty, weighted, alm or palm)");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& name) {
  const IniDocument doc = IniDocument::parse(text);
  const Sections sections(doc);

  Section problem_section = sections.get("problem");
  ProblemSpec problem = build_problem(problem_section, name);
  problem_section.reject_unknown();

  Section method_section = sections.get("method");
  MethodConfig method = build_method(method_section, problem);
  method_section.reject_unknown();

  Section eps_section = sections.get("epsilon");
  const EpsilonSchedule schedule = EpsilonSchedule::parse(eps_section.text("schedule").value_or("zero"));
  eps_section.reject_unknown();

  Section run_section = sections.get("run");
  RunOptions run;
  run.iterations = static_cast<int>(run_section.integer("iterations").value_or(30));
  if (run.iterations < 1) throw ConfigurationError("[run] iterations must be >= 1");
  const long long seed = run_section.integer("seed").value_or(0);
  if (seed < 0) throw ConfigurationError("[run] seed must be >= 0");
  run.seed = static_cast<std::uint64_t>(seed);
  const std::filesystem::path output = run_section.text("output").value_or("out/" + name);
  run_section.reject_unknown();

  Section solver_section = sections.get("solver");
  run.solver.budget = solver_section.integer("budget").value_or(run.solver.budget);
  if (run.solver.budget <= 0) throw ConfigurationError("[solver] budget must be positive");
  run.solver.multistart = static_cast<int>(solver_section.integer("multistart").value_or(run.solver.multistart));
  if (run.solver.multistart < 0) throw ConfigurationError("[solver] multistart must be >= 0");
  run.solver.require_certificate = solver_section.boolean("require_certificate").value_or(false);
  run.solver.relative_gap_floor = solver_section.number("relative_gap_floor").value_or(run.solver.relative_gap_floor);
  solver_section.reject_unknown();

  Section monitor_section = sections.get("monitor");
  MonitorConfig monitor;
  monitor.check.tail_window = static_cast<int>(monitor_section.integer("window").value_or(5));
  monitor.check.tolerance = monitor_section.number("tolerance").value_or(1e-3);
  if (monitor.check.tail_window < 1) throw ConfigurationError("[monitor] window must be >= 1");
  if (monitor.check.tail_window >= run.iterations) {
    throw ConfigurationError("[monitor] window must be smaller than the iteration count");
  }
  if (!(monitor.check.tolerance > 0.0)) throw ConfigurationError("[monitor] tolerance must be positive");
  monitor.exactness_threshold = monitor_section.number("exactness_threshold");
  if (auto expect = monitor_section.text("expect_exactness")) {
    monitor.expected_exactness = parse_exactness_class(*expect);
  }
  monitor.lsc_spot_check = monitor_section.boolean("lsc_check").value_or(false);
  monitor_section.reject_unknown();

  // Parameter domains are checked here so that a bad config never starts a run.
  try {
    validate_method_config(problem, method);
  } catch (const InputError& e) {
    throw ConfigurationError(std::string("[method] ") + e.what());
  }

  return ExperimentConfig{name, std::move(problem), std::move(method), schedule, run, output, monitor};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_experiment_config(buffer.str(), path.stem().string());
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
}

}  // namespace dualscheme
