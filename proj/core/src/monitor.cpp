#include "dualscheme/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "text.hpp"

namespace dualscheme {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr const char* kWeakDuality = "weak duality";
constexpr const char* kUniversal = "universal convergence theorem";
constexpr const char* kAsymptotic = "asymptotically exact primal-dual method";
constexpr const char* kPhiCondition = "phi-convergence to zero condition";
constexpr const char* kExactness = "global exactness and the least exact penalty parameter";
constexpr const char* kAlmHypotheses = "augmented Lagrangian convergence hypotheses";
constexpr const char* kPalmHypotheses = "P-type augmented Lagrangian convergence";

using detail::number_text;

CheckResult make(std::string check, const char* citation, double slack, int window, double tolerance,
                 std::string detail) {
  CheckResult r;
  r.check = std::move(check);
  r.citation = citation;
  r.verdict = slack >= 0.0 ? Verdict::Pass : Verdict::Fail;
  r.slack = slack;
  r.window = window;
  r.tolerance = tolerance;
  r.detail = std::move(detail);
  return r;
}

CheckResult not_applicable(std::string check, const char* citation, int window, double tolerance,
                           std::string detail) {
  CheckResult r;
  r.check = std::move(check);
  r.citation = citation;
  r.verdict = Verdict::NotApplicable;
  r.slack = kNaN;
  r.window = window;
  r.tolerance = tolerance;
  r.detail = std::move(detail);
  return r;
}

std::vector<const IterateRecord*> tail_of(const Trace& trace, int window) {
  if (window < 1) throw InputError("monitor: tail window must be >= 1");
  if (static_cast<int>(trace.records.size()) < window) {
    throw InputError("monitor: trace has " + std::to_string(trace.records.size()) +
                     " records, fewer than the tail window " + std::to_string(window));
  }
  std::vector<const IterateRecord*> tail;
  for (auto it = trace.records.end() - window; it != trace.records.end(); ++it) tail.push_back(&*it);
  return tail;
}

template <class Fn>
double tail_max(const std::vector<const IterateRecord*>& tail, Fn&& value) {
  double m = -kInf;
  for (const auto* r : tail) m = std::max(m, value(*r));
  return m;
}

template <class Fn>
double tail_min(const std::vector<const IterateRecord*>& tail, Fn&& value) {
  double m = kInf;
  for (const auto* r : tail) m = std::min(m, value(*r));
  return m;
}

bool schedule_tends_to_zero(const Trace& trace) {
  return EpsilonSchedule::parse(trace.schedule).asymptotically_exact();
}

// Largest t in (0, t_max] with witness(t) <= bound, by bisection; 0 when none is found.
template <class Fn>
double largest_admissible(Fn&& witness, double bound, double t_max = 1.0) {
  if (witness(t_max) <= bound) return t_max;
  double lo = 0.0;
  double hi = t_max;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0 || mid == hi) break;
    if (witness(mid) <= bound) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

const char* to_string(ExactnessClass c) {
  switch (c) {
    case ExactnessClass::Bounded: return "bounded";
    case ExactnessClass::Unbounded: return "unbounded";
    case ExactnessClass::Inconclusive: return "inconclusive";
    case ExactnessClass::NotApplicable: return "not-applicable";
  }
  return "?";
}

ExactnessClass parse_exactness_class(std::string_view text) {
  if (text == "bounded") return ExactnessClass::Bounded;
  if (text == "unbounded") return ExactnessClass::Unbounded;
  if (text == "inconclusive") return ExactnessClass::Inconclusive;
  throw ConfigurationError("exactness: expected bounded, unbounded or inconclusive, got '" + std::string(text) + "'");
}

double tail_eps_star(const Trace& trace, int window) {
  return tail_max(tail_of(trace, window), [](const IterateRecord& r) { return r.epsilon; });
}

CheckResult check_weak_duality(const Trace& trace, double f_star, double tolerance, bool allow_solver_gap) {
  const int n = static_cast<int>(trace.records.size());
  for (const auto& r : trace.records) {
    if (r.theta_lo == -kInf) {
      return not_applicable("weak_duality", kWeakDuality, n, tolerance, "dual brackets are not certified");
    }
  }
  if (trace.records.empty()) return not_applicable("weak_duality", kWeakDuality, 0, tolerance, "empty trace");
  double slack = kInf;
  int worst = 0;
  for (const auto& r : trace.records) {
    const double allowance = tolerance + (allow_solver_gap ? r.solver_gap : 0.0);
    const double s = f_star + allowance - r.theta_hi;
    if (s < slack) {
      slack = s;
      worst = r.n;
    }
  }
  return make("weak_duality", kWeakDuality, slack, n, tolerance,
              "theta_hi <= f_star + tolerance" + std::string(allow_solver_gap ? " + solver gap" : "") +
                  " at every iterate; tightest at n = " + std::to_string(worst));
}

std::vector<CheckResult> check_universal_conclusions(const Trace& trace, double f_star, const CheckConfig& config) {
  const auto tail = tail_of(trace, config.tail_window);
  const double eps = tail_max(tail, [](const IterateRecord& r) { return r.epsilon; });
  const double tol = config.tolerance;
  const int w = config.tail_window;
  const std::string eps_text = " (eps_star = " + number_text(eps) + ")";

  std::vector<CheckResult> out;
  const double f_max = tail_max(tail, [](const IterateRecord& r) { return r.f_val; });
  const double f_min = tail_min(tail, [](const IterateRecord& r) { return r.f_val; });
  out.push_back(make("f_upper", kUniversal, f_star + eps + tol - f_max, w, tol,
                     "tail max f = " + number_text(f_max) + " <= f_star + eps_star + tol" + eps_text));
  out.push_back(make("f_lower", kUniversal, f_min - (f_star - tol), w, tol,
                     "tail min f = " + number_text(f_min) + " >= f_star - tol"));

  const double m_max = tail_max(tail, [](const IterateRecord& r) { return r.merit_val; });
  const double m_min = tail_min(tail, [](const IterateRecord& r) { return r.merit_val; });
  out.push_back(make("merit_upper", kUniversal, f_star + eps + tol - m_max, w, tol,
                     "tail max F = " + number_text(m_max) + " <= f_star + eps_star + tol" + eps_text));
  out.push_back(make("merit_lower", kUniversal, m_min - (f_star - tol), w, tol,
                     "tail min F = " + number_text(m_min) + " >= f_star - tol"));

  const double lo_min = tail_min(tail, [](const IterateRecord& r) { return r.theta_lo; });
  const double hi_max = tail_max(tail, [](const IterateRecord& r) { return r.theta_hi; });
  if (lo_min == -kInf) {
    out.push_back(not_applicable("dual_bracket", kUniversal, w, tol, "dual brackets are not certified"));
  } else {
    const double slack = std::min(lo_min - (f_star - eps - tol), f_star + tol - hi_max);
    out.push_back(make("dual_bracket", kUniversal, slack, w, tol,
                       "tail brackets [" + number_text(lo_min) + ", " + number_text(hi_max) +
                           "] inside [f_star - eps_star - tol, f_star + tol]" + eps_text));
  }

  const double phi_max = tail_max(tail, [](const IterateRecord& r) { return r.phi_val; });
  out.push_back(make("phi_limsup", kUniversal, eps + tol - phi_max, w, tol,
                     "tail max phi = " + number_text(phi_max) + " <= eps_star + tol" + eps_text));

  const double inf_max = tail_max(tail, [](const IterateRecord& r) { return r.infeasibility; });
  out.push_back(make("infeasibility_limit", kUniversal, tol - inf_max, w, tol,
                     "tail max infeasibility = " + number_text(inf_max) + " <= tol"));
  return out;
}

std::vector<CheckResult> check_asymptotic(const Trace& trace, double f_star, const CheckConfig& config) {
  const auto tail = tail_of(trace, config.tail_window);
  const double tol = config.tolerance;
  const int w = config.tail_window;
  static const char* const kNames[] = {"f_limit", "merit_limit", "theta_limit", "phi_limit"};

  std::vector<CheckResult> out;
  if (!schedule_tends_to_zero(trace)) {
    for (const char* name : kNames) {
      out.push_back(not_applicable(name, kAsymptotic, w, tol,
                                   "epsilon schedule " + trace.schedule + " does not tend to zero"));
    }
    return out;
  }

  const double f_dev = tail_max(tail, [&](const IterateRecord& r) { return std::abs(r.f_val - f_star); });
  out.push_back(make("f_limit", kAsymptotic, tol - f_dev, w, tol, "tail max |f - f_star| = " + number_text(f_dev)));
  const double m_dev = tail_max(tail, [&](const IterateRecord& r) { return std::abs(r.merit_val - f_star); });
  out.push_back(
      make("merit_limit", kAsymptotic, tol - m_dev, w, tol, "tail max |F - f_star| = " + number_text(m_dev)));
  const double lo_min = tail_min(tail, [](const IterateRecord& r) { return r.theta_lo; });
  if (lo_min == -kInf) {
    out.push_back(not_applicable("theta_limit", kAsymptotic, w, tol, "dual brackets are not certified"));
  } else {
    const double t_dev = tail_max(tail, [&](const IterateRecord& r) {
      return std::max(std::abs(r.theta_lo - f_star), std::abs(r.theta_hi - f_star));
    });
    out.push_back(make("theta_limit", kAsymptotic, tol - t_dev, w, tol,
                       "tail max bracket distance to f_star = " + number_text(t_dev)));
  }
  const double p_dev = tail_max(tail, [](const IterateRecord& r) { return std::abs(r.phi_val); });
  out.push_back(make("phi_limit", kAsymptotic, tol - p_dev, w, tol, "tail max |phi| = " + number_text(p_dev)));
  return out;
}

PhiWitness check_phi_convergence_evidence(const Trace& trace) {
  PhiWitness out;
  const int size = static_cast<int>(trace.records.size());
  if (trace.records.empty()) {
    out.check = not_applicable("phi_convergence", kPhiCondition, 0, 0.0, "empty trace");
    return out;
  }

  double smallest = kInf;
  int failures = 0;
  for (const auto& r : trace.records) {
    const double bound = 1.0 / (r.n + 1.0);
    double t = 0.0;
    std::visit(
        [&](const auto& mu) {
          using T = std::decay_t<decltype(mu)>;
          if constexpr (std::is_same_v<T, PenaltyParam>) {
            t = largest_admissible([&](double s) { return mu.c * mu.omega(s); }, bound);
          } else if constexpr (std::is_same_v<T, WeightedParam>) {
            t = largest_admissible(
                [&](double s) { return mu.u.sum() * eta(s, mu.w) + mu.v.sum() * gamma_smooth(s, mu.w); }, bound);
          } else if constexpr (std::is_same_v<T, MultiplierParam>) {
            t = largest_admissible([&](double s) { return 2.0 * s * mu.lambda.norm() + 2.0 * mu.c * s * s; }, bound);
          } else {
            const double ell = static_cast<double>(std::max<Eigen::Index>(mu.lambda.size(), 1));
            const double cap = mu.c / (std::max(r.n, 1) * ell);
            t = largest_admissible(
                [&](double s) {
                  double worst = -kInf;
                  for (Eigen::Index i = 0; i < mu.lambda.size(); ++i) worst = std::max(worst, mu.p(mu.c * s, mu.lambda[i]));
                  return worst;
                },
                cap);
          }
        },
        r.mu);
    out.t.push_back(t);
    if (!(t > 0.0)) ++failures;
    smallest = std::min(smallest, t);
  }
  std::ostringstream detail;
  detail << "bisection found t_n > 0 at " << (size - failures) << " of " << size << " iterates; t_first = "
         << number_text(out.t.front()) << ", t_last = " << number_text(out.t.back());
  out.check = make("phi_convergence", kPhiCondition, failures == 0 ? smallest : -1.0, size, 0.0, detail.str());
  return out;
}

ExactnessReport detect_exactness(const Trace& trace, double threshold_c, const CheckConfig& config,
                                 std::optional<ExactnessClass> expected) {
  ExactnessReport out;
  const int w = config.tail_window;
  const double tol = config.tolerance;
  auto inapplicable = [&](std::string why) {
    out.classification = ExactnessClass::NotApplicable;
    out.check = not_applicable("exactness", kExactness, w, tol, std::move(why));
    return out;
  };
  if (trace.records.empty()) return inapplicable("empty trace");
  const bool penalty = std::holds_alternative<PenaltyParam>(trace.records.front().mu);
  const bool weighted = std::holds_alternative<WeightedParam>(trace.records.front().mu);
  if (!penalty && !weighted) return inapplicable("exactness applies to penalty and weighted runs only");
  if (static_cast<int>(trace.records.size()) < w) return inapplicable("trace shorter than the tail window");
  if (!schedule_tends_to_zero(trace)) return inapplicable("epsilon schedule does not tend to zero");

  auto level = [](const IterateRecord& r) {
    if (const auto* p = std::get_if<PenaltyParam>(&r.mu)) return p->c;
    const auto& q = std::get<WeightedParam>(r.mu);
    double m = 0.0;
    if (q.u.size() > 0) m = std::max(m, q.u.maxCoeff());
    if (q.v.size() > 0) m = std::max(m, q.v.maxCoeff());
    return m;
  };
  const auto tail = tail_of(trace, w);
  const double first = level(*tail.front());
  const double last = level(*tail.back());
  const double hi = tail_max(tail, level);
  const double lo = tail_min(tail, level);
  const double rel_change = (hi - lo) / std::max(1.0, std::abs(last));
  const double inf_first = tail.front()->infeasibility;
  const double inf_last = tail.back()->infeasibility;
  const double inf_min = tail_min(tail, [](const IterateRecord& r) { return r.infeasibility; });

  std::ostringstream detail;
  detail << "penalty level " << number_text(first) << " -> " << number_text(last) << " over the tail (relative change "
         << number_text(rel_change) << ", threshold " << number_text(threshold_c) << ")";
  ExactnessClass cls = ExactnessClass::Inconclusive;
  if (hi <= threshold_c && rel_change <= tol) {
    cls = ExactnessClass::Bounded;
    detail << "; bounded: exactness certificate, least exact parameter <= " << number_text(last);
  } else if (last > threshold_c && inf_last <= inf_first) {
    cls = ExactnessClass::Unbounded;
    detail << "; unbounded penalty growth, exactness not witnessed";
  } else if (rel_change > tol && last > first && inf_min > 0.0) {
    cls = ExactnessClass::Unbounded;
    detail << "; penalty still growing with infeasible iterates, exactness not witnessed";
  } else {
    detail << "; inconclusive";
  }
  out.classification = cls;

  double margin = std::abs(threshold_c - hi);
  Verdict verdict;
  if (expected) {
    verdict = cls == *expected ? Verdict::Pass : Verdict::Fail;
    detail << " (expected " << to_string(*expected) << ")";
  } else {
    verdict = cls == ExactnessClass::Inconclusive ? Verdict::NotApplicable : Verdict::Pass;
  }
  out.check = make("exactness", kExactness, verdict == Verdict::Fail ? -margin : margin, w, tol, detail.str());
  out.check.verdict = verdict;
  if (verdict == Verdict::NotApplicable) out.check.slack = kNaN;
  return out;
}

CheckResult check_alm_regime(const Trace& trace, const CheckConfig& config) {
  const int w = config.tail_window;
  const double tol = config.tolerance;
  if (trace.records.empty() || !std::holds_alternative<MultiplierParam>(trace.records.front().mu)) {
    return not_applicable("alm_regime", kAlmHypotheses, w, tol, "not an augmented Lagrangian run");
  }
  if (static_cast<int>(trace.records.size()) < w) {
    return not_applicable("alm_regime", kAlmHypotheses, w, tol, "trace shorter than the tail window");
  }
  const auto tail = tail_of(trace, w);
  auto c_of = [](const IterateRecord& r) { return std::get<MultiplierParam>(r.mu).c; };
  const bool c_bounded = tail_max(tail, c_of) == tail_min(tail, c_of);
  if (c_bounded) {
    const double sigma = tail_max(tail, [](const IterateRecord& r) {
      const auto it = r.internals.find("sigma");
      return it == r.internals.end() ? kInf : it->second;
    });
    const double lambda = tail_max(tail, [](const IterateRecord& r) { return std::get<MultiplierParam>(r.mu).lambda.norm(); });
    return make("alm_regime", kAlmHypotheses, tol - sigma, w, tol,
                "c bounded at " + number_text(c_of(*tail.back())) + "; tail max sigma = " + number_text(sigma) +
                    ", tail max |lambda| = " + number_text(lambda));
  }
  const double ratio = std::get<MultiplierParam>(tail.back()->mu).lambda.norm() / std::sqrt(c_of(*tail.back()));
  return make("alm_regime", kAlmHypotheses, tol - ratio, w, tol,
              "c unbounded (" + number_text(c_of(*tail.front())) + " -> " + number_text(c_of(*tail.back())) +
                  "); final |lambda| / sqrt(c) = " + number_text(ratio));
}

CheckResult check_palm_hypotheses(const Trace& trace) {
  const int size = static_cast<int>(trace.records.size());
  if (trace.records.empty() || !std::holds_alternative<PalmParam>(trace.records.front().mu)) {
    return not_applicable("palm_hypotheses", kPalmHypotheses, size, 0.0, "not a PALM run");
  }
  double f_min = kInf;
  double lambda_min = kInf;
  double floor_margin = kInf;
  for (const auto& r : trace.records) {
    const auto& mu = std::get<PalmParam>(r.mu);
    f_min = std::min(f_min, r.f_val);
    if (mu.lambda.size() > 0) lambda_min = std::min(lambda_min, mu.lambda.minCoeff());
    floor_margin = std::min(floor_margin, mu.c - r.n);
  }
  const double slack = std::isfinite(f_min) ? std::min(lambda_min, floor_margin) : -kInf;
  std::string detail = "min f = " + number_text(f_min) + ", min lambda = " + number_text(lambda_min) +
                       ", min (c_n - n) = " + number_text(floor_margin);
  if (std::get<PalmParam>(trace.records.front().mu).p.kind() == PFunction::Kind::Exponential) {
    detail += "; exponential kernel: P(s, 0) / s does not diverge, guarantees are reduced";
  }
  return make("palm_hypotheses", kPalmHypotheses, slack, size, 0.0, detail);
}

int ConvergenceReport::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.verdict == Verdict::Pass;
  }));
}

int ConvergenceReport::failed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.verdict == Verdict::Fail;
  }));
}

namespace {

void lsc_notes(const ProblemSpec& problem, ConvergenceReport& report) {
  const int layout = problem.constraint_layout_dim();
  const int d = problem.dimension;
  const double width = (problem.ground.upper() - problem.ground.lower()).maxCoeff();
  const double resolution = width / std::floor(std::pow(20000.0, 1.0 / d));
  const double slack = problem.bounds ? resolution * problem.bounds->constraint_lipschitz * std::sqrt(d) : resolution;
  double least = kInf;
  for (double radius : {1e-1, 1e-2}) {
    for (int i = 0; i < layout; ++i) {
      for (double sign : {-1.0, 1.0}) {
        Vec y = Vec::Zero(layout);
        y[i] = sign * radius;
        try {
          const auto est = perturbation_estimate(problem, {y, resolution}, slack);
          least = std::min(least, est.value);
        } catch (const InfeasibleAtResolution&) {
          least = std::min(least, kInf);
        }
      }
    }
    report.notes.push_back("optimal value function spot-check: min over |y| = " + number_text(radius) +
                           " estimates beta ~ " + number_text(least) + " at grid resolution " +
                           number_text(resolution));
  }
}

}  // namespace

ConvergenceReport run_monitor(const Trace& trace, const ProblemSpec& problem, const MonitorConfig& config) {
  ConvergenceReport report;
  report.method = trace.method;
  report.problem = trace.problem;
  const CheckConfig& cc = config.check;
  if (cc.tail_window < 1) throw InputError("monitor: tail window must be >= 1");
  if (!(cc.tolerance > 0.0)) throw InputError("monitor: tolerance must be positive");

  if (trace.aborted) report.notes.push_back("run aborted: " + trace.abort_reason);
  if (!problem.strong_duality) {
    report.notes.push_back("no strong-duality note for this problem; limits may sit below f_star");
  } else if (!problem.duality_note.empty()) {
    report.notes.push_back("strong duality: " + problem.duality_note);
  }

  const bool long_enough = static_cast<int>(trace.records.size()) >= cc.tail_window;
  if (!problem.certified) {
    report.notes.push_back("problem has no certified optimum; value checks are not applicable");
    report.checks.push_back(not_applicable("weak_duality", kWeakDuality, cc.tail_window, cc.tolerance, "no f_star"));
    report.checks.push_back(not_applicable("universal_conclusions", kUniversal, cc.tail_window, cc.tolerance, "no f_star"));
  } else {
    const double f_star = problem.certified->f_star;
    report.checks.push_back(check_weak_duality(trace, f_star, cc.tolerance));
    if (long_enough) {
      for (auto& c : check_universal_conclusions(trace, f_star, cc)) report.checks.push_back(std::move(c));
      for (auto& c : check_asymptotic(trace, f_star, cc)) report.checks.push_back(std::move(c));
    } else {
      report.checks.push_back(not_applicable("universal_conclusions", kUniversal, cc.tail_window, cc.tolerance,
                                             "trace shorter than the tail window"));
    }
  }
  report.checks.push_back(check_phi_convergence_evidence(trace).check);

  if (!trace.records.empty()) {
    const MeritParam& mu = trace.records.front().mu;
    if (std::holds_alternative<PenaltyParam>(mu) || std::holds_alternative<WeightedParam>(mu)) {
      auto ex = detect_exactness(trace, config.exactness_threshold.value_or(1e4), cc, config.expected_exactness);
      report.notes.push_back(std::string("penalty regime: ") + to_string(ex.classification));
      report.checks.push_back(std::move(ex.check));
    } else if (std::holds_alternative<MultiplierParam>(mu)) {
      CheckResult regime = check_alm_regime(trace, cc);
      report.notes.push_back("augmented Lagrangian regime: " + regime.detail);
      report.checks.push_back(std::move(regime));
    } else {
      report.checks.push_back(check_palm_hypotheses(trace));
    }
  }
  if (config.lsc_spot_check) lsc_notes(problem, report);
  return report;
}

}  // namespace dualscheme
