// Command-line runner: run one experiment, a directory of experiments, or inspect the catalogue.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "dualscheme/config.hpp"
#include "dualscheme/experiment.hpp"
#include "dualscheme/problems.hpp"

namespace {

using namespace dualscheme;

const std::map<std::string, std::string>& method_descriptions() {
  static const std::map<std::string, std::string> text = {
      {"penalty",
       "penalty: primal-dual penalty method.\n"
       "  F(x, c) = f(x) + c * omega(infeasibility(x)); c_{n+1} = c_n + s_n (omega(infeas_n) + delta).\n"
       "  keys: omega = identity | power:<p> | barrierlog:<tau>, c0, step, delta\n"},
      {"weighted",
       "weighted: rounded weighted l1 penalty method.\n"
       "  phi = sum u_i eta(h_i, w) + sum v_j gamma(g_j, w); (u, v) += s_n (p_n + delta); w *= w_decay.\n"
       "  keys: u0, v0, w0, w_decay, step, delta\n"},
      {"alm",
       "alm: inexact augmented Lagrangian method for cone constraints.\n"
       "  lambda_{n+1} = Pi_{K*}(lambda_n + c_n G(x_n)); c grows by `growth` unless sigma_n <= tau sigma_{n-1}.\n"
       "  keys: lambda0, c0, multiplier = plain | safeguarded, radius, tau, growth, sigma_floor\n"},
      {"palm",
       "palm: multiplier method based on a P-type augmented Lagrangian (inequalities only).\n"
       "  lambda_{n+1,i} = dP/ds(c_n g_i(x_n), lambda_{n,i}); c_{n+1} = max((n+1) max(1, sum |r(lambda)|), growth c_n).\n"
       "  keys: lambda0, c0, p = hpr | exp, growth, x0\n"},
  };
  return text;
}

const char* const kCommonKeys =
    "common sections: [epsilon] schedule = zero | constant:<eps> | geometric:<eps0>:<ratio>\n"
    "                 [run] iterations, seed, output\n"
    "                 [monitor] window, tolerance, exactness_threshold, expect_exactness, lsc_check\n"
    "                 [solver] budget, multistart, require_certificate, relative_gap_floor\n"
    "step rules: constant:<s> | norm:square | norm:linear | norm:sqrt\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual penalty and augmented Lagrangian experiments with convergence monitoring"};
  app.require_subcommand(1);

  Overrides overrides;
  std::uint64_t seed = 0;
  int iterations = 0;
  double tolerance = 0.0;
  std::string out;
  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the random seed");
    sub->add_option("--iters", iterations, "Override the iteration count");
    sub->add_option("--tol", tolerance, "Override the monitor tolerance");
    sub->add_option("--out", out, "Output directory");
  };

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run one experiment configuration");
  run->add_option("config", config_path, "Configuration file")->required();
  add_overrides(run);

  std::string suite_dir;
  CLI::App* suite = app.add_subcommand("suite", "Run every *.cfg in a directory");
  suite->add_option("dir", suite_dir, "Directory of configurations")->required();
  add_overrides(suite);

  app.add_subcommand("list-problems", "List the built-in test problems");

  std::string method;
  CLI::App* describe = app.add_subcommand("describe", "Describe a method and its configuration keys");
  describe->add_option("method", method, "penalty | weighted | alm | palm")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  auto collect = [&](CLI::App* sub) {
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--iters")) overrides.iterations = iterations;
    if (sub->count("--tol")) overrides.tolerance = tolerance;
    if (sub->count("--out")) overrides.output_dir = out;
  };

  try {
    if (app.got_subcommand("list-problems")) {
      for (const auto& id : library_problem_ids()) {
        const ProblemSpec p = library_problem(id);
        std::cout << id << "  " << p.description;
        if (p.certified) std::cout << "  (f* = " << p.certified->f_star << ")";
        std::cout << '\n';
      }
      return kExitOk;
    }
    if (app.got_subcommand("describe")) {
      const auto& text = method_descriptions();
      const auto it = text.find(method);
      if (it == text.end()) {
        std::cerr << "error: unknown method '" << method << "' (expected penalty, weighted, alm or palm)\n";
        return kExitValidation;
      }
      std::cout << it->second << kCommonKeys;
      return kExitOk;
    }
    if (run->parsed()) {
      collect(run);
      ExperimentConfig config = load_experiment_config(config_path);
      apply_overrides(config, overrides);
      const ExperimentOutcome outcome = run_experiment(config);
      std::cout << outcome.summary << '\n';
      if (outcome.trace.aborted) std::cerr << "run aborted: " << outcome.trace.abort_reason << '\n';
      return outcome.exit_code;
    }
    if (suite->parsed()) {
      collect(suite);
      const SuiteOutcome outcome = run_suite(suite_dir, overrides, std::cout);
      std::cout << "aggregate: " << outcome.aggregate_path.string() << '\n';
      return outcome.exit_code;
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
