#include "dualscheme/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

namespace dualscheme {

namespace {

using Json = nlohmann::ordered_json;

std::string csv_number(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("trace.csv: number formatting failed");
  return std::string(buf, ptr);
}

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

void append_method_columns(const MeritParam& mu, std::vector<std::string>& names) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PenaltyParam>) {
          names.push_back("c");
        } else if constexpr (std::is_same_v<T, WeightedParam>) {
          for (Eigen::Index i = 0; i < m.u.size(); ++i) names.push_back("u" + std::to_string(i + 1));
          for (Eigen::Index j = 0; j < m.v.size(); ++j) names.push_back("v" + std::to_string(j + 1));
          names.push_back("w");
        } else if constexpr (std::is_same_v<T, MultiplierParam>) {
          for (Eigen::Index i = 0; i < m.lambda.size(); ++i) names.push_back("lambda" + std::to_string(i + 1));
          names.push_back("c");
          names.push_back("sigma");
        } else {
          for (Eigen::Index i = 0; i < m.lambda.size(); ++i) names.push_back("lambda" + std::to_string(i + 1));
          names.push_back("c");
        }
      },
      mu);
}

void append_method_values(const IterateRecord& r, std::vector<double>& values) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PenaltyParam>) {
          values.push_back(m.c);
        } else if constexpr (std::is_same_v<T, WeightedParam>) {
          for (Eigen::Index i = 0; i < m.u.size(); ++i) values.push_back(m.u[i]);
          for (Eigen::Index j = 0; j < m.v.size(); ++j) values.push_back(m.v[j]);
          values.push_back(m.w);
        } else if constexpr (std::is_same_v<T, MultiplierParam>) {
          for (Eigen::Index i = 0; i < m.lambda.size(); ++i) values.push_back(m.lambda[i]);
          values.push_back(m.c);
          const auto it = r.internals.find("sigma");
          values.push_back(it == r.internals.end() ? std::nan("") : it->second);
        } else {
          for (Eigen::Index i = 0; i < m.lambda.size(); ++i) values.push_back(m.lambda[i]);
          values.push_back(m.c);
        }
      },
      r.mu);
}

std::string format_summary_number(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void apply_overrides(ExperimentConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.run.seed = *overrides.seed;
  if (overrides.iterations) {
    if (*overrides.iterations < 1) throw ConfigurationError("--iters must be >= 1");
    config.run.iterations = *overrides.iterations;
    if (config.monitor.check.tail_window >= config.run.iterations) {
      throw ConfigurationError("monitor window must be smaller than the iteration count");
    }
  }
  if (overrides.tolerance) {
    if (!(*overrides.tolerance > 0.0)) throw ConfigurationError("--tol must be positive");
    config.monitor.check.tolerance = *overrides.tolerance;
  }
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
}

std::vector<std::string> trace_columns(const Trace& trace, const ProblemSpec& problem) {
  std::vector<std::string> names = {"n", "epsilon", "f", "phi", "F", "theta_lo", "theta_hi", "infeasibility"};
  if (!trace.records.empty()) append_method_columns(trace.records.front().mu, names);
  for (int k = 0; k < problem.dimension; ++k) names.push_back("x" + std::to_string(k + 1));
  return names;
}

void write_trace_csv(const Trace& trace, const ProblemSpec& problem, std::ostream& out) {
  const auto names = trace_columns(trace, problem);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  std::vector<double> values;
  for (const auto& r : trace.records) {
    const double sum = r.f_val + r.phi_val;
    if (!(std::abs(r.merit_val - sum) <= 1e-12 * std::max(1.0, std::abs(sum))) &&
        !(std::isinf(r.merit_val) && r.merit_val == sum)) {
      throw Error("trace.csv: record " + std::to_string(r.n) + " violates F = f + phi");
    }
    values = {r.epsilon, r.f_val, r.phi_val, r.merit_val, r.theta_lo, r.theta_hi, r.infeasibility};
    append_method_values(r, values);
    for (Eigen::Index k = 0; k < r.x.size(); ++k) values.push_back(r.x[k]);
    out << r.n;
    for (double v : values) out << ',' << csv_number(v);
    out << '\n';
  }
}

std::string report_json(const ConvergenceReport& report, const Trace& trace) {
  Json doc;
  doc["method"] = report.method;
  doc["problem"] = report.problem;
  doc["schedule"] = trace.schedule;
  doc["iterations"] = trace.records.size();
  doc["aborted"] = trace.aborted;
  if (trace.aborted) doc["abort_reason"] = trace.abort_reason;
  doc["passed"] = report.passed();
  doc["failed"] = report.failed();
  doc["total"] = report.total();
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"check", c.check},
                          {"citation", c.citation},
                          {"verdict", to_string(c.verdict)},
                          {"slack", json_number(c.slack)},
                          {"window", c.window},
                          {"tolerance", json_number(c.tolerance)},
                          {"detail", c.detail}});
  }
  doc["checks"] = std::move(checks);
  doc["notes"] = report.notes;
  return doc.dump(2) + "\n";
}

std::string summary_line(const Trace& trace, const ConvergenceReport& report) {
  std::string f_last = "nan";
  std::string infeas_last = "nan";
  if (!trace.records.empty()) {
    f_last = format_summary_number(trace.records.back().f_val);
    infeas_last = format_summary_number(trace.records.back().infeasibility);
  }
  return trace.method + " " + trace.problem + " " + std::to_string(trace.records.size()) + " " + f_last + " " +
         infeas_last + " " + std::to_string(report.passed()) + "/" + std::to_string(report.total());
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  ExperimentOutcome outcome;
  outcome.trace = run_method(config.problem, config.method, config.schedule, config.run);
  outcome.report = run_monitor(outcome.trace, config.problem, config.monitor);
  outcome.summary = summary_line(outcome.trace, outcome.report);

  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream csv(config.output_dir / "trace.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (config.output_dir / "trace.csv").string());
    write_trace_csv(outcome.trace, config.problem, csv);
  }
  {
    std::ofstream json(config.output_dir / "report.json", std::ios::binary);
    if (!json) throw Error("cannot write " + (config.output_dir / "report.json").string());
    json << report_json(outcome.report, outcome.trace);
  }

  if (outcome.trace.aborted) {
    outcome.exit_code = kExitRuntime;
  } else if (outcome.report.failed() > 0) {
    outcome.exit_code = kExitCheckFailure;
  }
  return outcome;
}

SuiteOutcome run_suite(const std::filesystem::path& directory, const Overrides& overrides, std::ostream& log) {
  if (!std::filesystem::is_directory(directory)) throw InputError("suite: '" + directory.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("suite: no .cfg files in '" + directory.string() + "'");

  const std::filesystem::path root = overrides.output_dir.value_or("out");
  SuiteOutcome outcome;
  outcome.aggregate_path = root / "aggregate.json";

  // Parse everything first so that bad or clashing configs stop the suite before any run.
  std::vector<std::optional<ExperimentConfig>> configs;
  std::map<std::string, std::string> claimed;
  for (const auto& file : files) {
    SuiteEntry entry;
    entry.config = file.filename().string();
    try {
      ExperimentConfig config = load_experiment_config(file);
      Overrides local = overrides;
      local.output_dir = overrides.output_dir ? std::optional(root / file.stem()) : std::nullopt;
      apply_overrides(config, local);
      const std::string key = std::filesystem::weakly_canonical(config.output_dir).string();
      if (auto it = claimed.find(key); it != claimed.end()) {
        throw InputError("suite: " + entry.config + " and " + it->second + " both write to '" +
                         config.output_dir.string() + "'");
      }
      claimed.emplace(key, entry.config);
      configs.emplace_back(std::move(config));
    } catch (const ConfigurationError& e) {
      entry.status = "invalid";
      entry.message = e.what();
      entry.exit_code = kExitValidation;
      configs.emplace_back(std::nullopt);
    }
    outcome.entries.push_back(std::move(entry));
  }

  for (std::size_t i = 0; i < files.size(); ++i) {
    SuiteEntry& entry = outcome.entries[i];
    if (!configs[i]) {
      log << entry.config << ": invalid: " << entry.message << '\n';
      continue;
    }
    try {
      const ExperimentOutcome run = run_experiment(*configs[i]);
      entry.passed = run.report.passed();
      entry.total = run.report.total();
      entry.exit_code = run.exit_code;
      entry.status = run.exit_code == kExitOk ? "ok" : run.exit_code == kExitRuntime ? "runtime-error" : "check-failure";
      entry.message = run.summary;
      log << run.summary << '\n';
    } catch (const Error& e) {
      entry.status = "runtime-error";
      entry.message = e.what();
      entry.exit_code = kExitRuntime;
      log << entry.config << ": runtime error: " << e.what() << '\n';
    }
  }

  Json aggregate = Json::object();
  for (const auto& e : outcome.entries) {
    aggregate[e.config] = Json{{"status", e.status},
                               {"passed", e.passed},
                               {"total", e.total},
                               {"exit_code", e.exit_code},
                               {"message", e.message}};
  }
  // Validation failures dominate, then runtime errors, then check failures.
  int code = kExitOk;
  for (const auto& e : outcome.entries) {
    if (e.exit_code == kExitValidation) {
      code = kExitValidation;
      break;
    }
    if (e.exit_code == kExitRuntime) code = kExitRuntime;
    if (e.exit_code == kExitCheckFailure && code == kExitOk) code = kExitCheckFailure;
  }
  outcome.exit_code = code;

  std::filesystem::create_directories(root);
  std::ofstream out(outcome.aggregate_path, std::ios::binary);
  if (!out) throw Error("cannot write " + outcome.aggregate_path.string());
  out << aggregate.dump(2) << '\n';
  return outcome;
}

}  // namespace dualscheme
