#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dualscheme/config.hpp"
#include "dualscheme/methods.hpp"
#include "dualscheme/monitor.hpp"

namespace dualscheme {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitCheckFailure = 3,
};

/// Command-line overrides applied on top of a parsed configuration.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<double> tolerance;
  std::optional<std::filesystem::path> output_dir;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// Column names of trace.csv for a trace of this problem.
std::vector<std::string> trace_columns(const Trace& trace, const ProblemSpec& problem);

/// One header row, then one row per record; 17 significant digits, '.' decimal.
/// Throws Error if a row violates merit = f + phi.
void write_trace_csv(const Trace& trace, const ProblemSpec& problem, std::ostream& out);

/// The monitor report plus run metadata as pretty-printed JSON.
std::string report_json(const ConvergenceReport& report, const Trace& trace);

/// "method problem iters f_last infeas_last passed/total".
std::string summary_line(const Trace& trace, const ConvergenceReport& report);

struct ExperimentOutcome {
  Trace trace;
  ConvergenceReport report;
  std::string summary;
  int exit_code = kExitOk;
};

/// Runs the method, the monitor, and writes trace.csv and report.json into config.output_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

struct SuiteEntry {
  std::string config;
  std::string status;  // ok, invalid, runtime-error, check-failure
  std::string message;
  int passed = 0;
  int total = 0;
  int exit_code = kExitOk;
};

struct SuiteOutcome {
  std::vector<SuiteEntry> entries;
  std::filesystem::path aggregate_path;
  int exit_code = kExitOk;
};

/// Runs every *.cfg in `directory` (sorted by name) and writes aggregate.json.
///
/// Each experiment writes to <output_root>/<config stem> when an output
/// override is given, else to its configured directory. The aggregate goes to
/// <output_root>/aggregate.json (output_root defaults to "out"). Throws
/// InputError for an empty directory or when two valid configs share an
/// output directory; no experiment runs in either case.
SuiteOutcome run_suite(const std::filesystem::path& directory, const Overrides& overrides, std::ostream& log);

}  // namespace dualscheme
