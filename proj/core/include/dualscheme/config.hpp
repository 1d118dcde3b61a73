#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dualscheme/methods.hpp"
#include "dualscheme/monitor.hpp"
#include "dualscheme/problems.hpp"

namespace dualscheme {

/// Sectioned key = value text. '#' and ';' start comments; keys may repeat.
class IniDocument {
 public:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line;
  };

  static IniDocument parse(std::string_view text);

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// A fully validated experiment.
///
/// Sections and keys:
///
///   [problem]  id = P1..P6 | P5-ineq, or an inline definition:
///              name, description, dimension, objective, equality (repeatable),
///              inequality (repeatable), lower, upper, cone_map, cone, f_star,
///              x_star, strong_duality, objective_lipschitz, objective_curvature,
///              constraint_lipschitz, constraint_curvature, constraint_magnitude
///   [method]   name = penalty | weighted | alm | palm, then per method:
///              penalty:  omega, c0, step, delta
///              weighted: u0, v0, w0, w_decay, step, delta
///              alm:      lambda0, c0, multiplier = plain | safeguarded, radius, tau, growth, sigma_floor
///              palm:     lambda0, c0, p = hpr | exp, growth, x0
///   [epsilon]  schedule = zero | constant:<eps> | geometric:<eps0>:<ratio>
///   [run]      iterations, seed, output
///   [monitor]  window, tolerance, exactness_threshold, expect_exactness, lsc_check
///   [solver]   budget, multistart, require_certificate, relative_gap_floor
///
/// Lists are comma separated.
struct ExperimentConfig {
  std::string name;
  ProblemSpec problem;
  MethodConfig method;
  EpsilonSchedule schedule = EpsilonSchedule::zero();
  RunOptions run;
  std::filesystem::path output_dir;
  MonitorConfig monitor;
};

/// Throws ConfigurationError with the offending line on any problem. `name`
/// labels the experiment and sets the default output directory out/<name>.
ExperimentConfig parse_experiment_config(std::string_view text, const std::string& name);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace dualscheme
