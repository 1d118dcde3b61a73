#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dualscheme/experiment.hpp"
#include "support.hpp"

namespace {

using namespace dualscheme;
namespace fs = std::filesystem;
using testing_support::vec;

class ScratchDir {
 public:
  ScratchDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / ("dualscheme_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

const char* const kQuickAlm = R"(
[problem]
id = P1
[method]
name = alm
c0 = 2
[epsilon]
schedule = geometric:0.1:0.5
[run]
iterations = 8
seed = 5
[monitor]
window = 3
tolerance = 0.01
)";

TEST(Experiment, TraceIsByteIdenticalAcrossRuns) {
  ScratchDir dir;
  ExperimentConfig config = parse_experiment_config(kQuickAlm, "quick");
  config.output_dir = dir.path() / "a";
  const ExperimentOutcome a = run_experiment(config);
  config.output_dir = dir.path() / "b";
  const ExperimentOutcome b = run_experiment(config);
  EXPECT_EQ(read(dir.path() / "a" / "trace.csv"), read(dir.path() / "b" / "trace.csv"));
  EXPECT_EQ(read(dir.path() / "a" / "report.json"), read(dir.path() / "b" / "report.json"));
  EXPECT_EQ(a.summary, b.summary);
  EXPECT_EQ(a.exit_code, kExitOk);
}

TEST(Experiment, TraceColumnsAndRows) {
  ScratchDir dir;
  ExperimentConfig config = parse_experiment_config(kQuickAlm, "quick");
  config.output_dir = dir.path();
  run_experiment(config);
  std::istringstream csv(read(dir.path() / "trace.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "n,epsilon,f,phi,F,theta_lo,theta_hi,infeasibility,lambda1,c,sigma,x1");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
    EXPECT_EQ(line.find(' '), std::string::npos);
  }
  EXPECT_EQ(rows, 8);
}

TEST(Experiment, ColumnsPerMethod) {
  auto columns = [](const std::string& text) {
    const ExperimentConfig c = parse_experiment_config(text, "cols");
    RunOptions run = c.run;
    run.iterations = 1;
    const Trace t = run_method(c.problem, c.method, c.schedule, run);
    std::string joined;
    for (const auto& name : trace_columns(t, c.problem)) joined += name + ",";
    return joined;
  };
  EXPECT_EQ(columns("[problem]\nid = P6\n[method]\nname = penalty\n"),
            "n,epsilon,f,phi,F,theta_lo,theta_hi,infeasibility,c,x1,");
  EXPECT_EQ(columns("[problem]\nid = P5\n[method]\nname = weighted\n"),
            "n,epsilon,f,phi,F,theta_lo,theta_hi,infeasibility,u1,v1,w,x1,x2,");
  EXPECT_EQ(columns("[problem]\nid = P5-ineq\n[method]\nname = palm\n"),
            "n,epsilon,f,phi,F,theta_lo,theta_hi,infeasibility,lambda1,lambda2,c,x1,x2,");
}

TEST(Experiment, WriterRejectsInconsistentRows) {
  const ProblemSpec p1 = library_problem("P1");
  Trace t{.method = "alm-plain", .problem = "P1", .schedule = "zero"};
  t.records.push_back(IterateRecord{.n = 0, .x = vec({1.0}), .mu = MultiplierParam{vec({0.0}), 1.0},
                                    .f_val = 1.0, .phi_val = 0.0, .merit_val = 1.5});
  std::ostringstream out;
  EXPECT_THROW(write_trace_csv(t, p1, out), Error);
  t.records[0].merit_val = 1.0;
  std::ostringstream ok;
  EXPECT_NO_THROW(write_trace_csv(t, p1, ok));
  EXPECT_NE(ok.str().find("-inf,inf"), std::string::npos);  // default bracket sentinels
}

TEST(Experiment, ReportJsonShape) {
  ConvergenceReport report{.method = "penalty", .problem = "P6", .checks = {}, .notes = {"a note"}};
  report.checks.push_back(CheckResult{"f_upper", "universal convergence theorem", Verdict::Pass, 0.25, 5, 1e-3, "ok"});
  report.checks.push_back(CheckResult{"theta_limit", "asymptotic", Verdict::NotApplicable, std::nan(""), 5, 1e-3, "na"});
  const Trace t{.method = "penalty", .problem = "P6", .schedule = "zero"};
  const std::string json = report_json(report, t);
  EXPECT_NE(json.find("\"passed\": 1"), std::string::npos);
  EXPECT_NE(json.find("\"total\": 2"), std::string::npos);
  EXPECT_NE(json.find("\"slack\": null"), std::string::npos);
  EXPECT_NE(json.find("\"verdict\": \"not-applicable\""), std::string::npos);
  EXPECT_NE(json.find("\"citation\": \"universal convergence theorem\""), std::string::npos);
  EXPECT_NE(json.find("a note"), std::string::npos);
}

TEST(Experiment, SummaryLine) {
  ScratchDir dir;
  ExperimentConfig config = parse_experiment_config(kQuickAlm, "quick");
  config.output_dir = dir.path();
  const ExperimentOutcome o = run_experiment(config);
  std::istringstream fields(o.summary);
  std::string method, problem, iters, f_last, infeas_last, ratio;
  fields >> method >> problem >> iters >> f_last >> infeas_last >> ratio;
  EXPECT_EQ(method, "alm-plain");
  EXPECT_EQ(problem, "P1");
  EXPECT_EQ(iters, "8");
  EXPECT_NEAR(std::stod(f_last), 1.0, 1e-2);
  EXPECT_EQ(ratio, std::to_string(o.report.passed()) + "/" + std::to_string(o.report.total()));
}

TEST(Experiment, Overrides) {
  ExperimentConfig config = parse_experiment_config(kQuickAlm, "quick");
  apply_overrides(config, Overrides{.seed = 9, .iterations = 20, .tolerance = 0.5, .output_dir = "x"});
  EXPECT_EQ(config.run.seed, 9u);
  EXPECT_EQ(config.run.iterations, 20);
  EXPECT_EQ(config.monitor.check.tolerance, 0.5);
  EXPECT_EQ(config.output_dir, fs::path("x"));
  EXPECT_THROW(apply_overrides(config, Overrides{.iterations = 3}), ConfigurationError);
  EXPECT_THROW(apply_overrides(config, Overrides{.tolerance = -1.0}), ConfigurationError);
}

TEST(Experiment, AbortedRunExitsWithRuntimeCode) {
  ScratchDir dir;
  ExperimentConfig config = parse_experiment_config(std::string(kQuickAlm) +
                                                        "[solver]\nbudget = 10\nrequire_certificate = true\n",
                                                    "abort");
  config.output_dir = dir.path();
  const ExperimentOutcome o = run_experiment(config);
  EXPECT_TRUE(o.trace.aborted);
  EXPECT_EQ(o.exit_code, kExitRuntime);
  EXPECT_TRUE(fs::exists(dir.path() / "trace.csv"));
  EXPECT_NE(read(dir.path() / "report.json").find("abort_reason"), std::string::npos);
}

TEST(Suite, InvalidConfigDoesNotStopOthers) {
  ScratchDir dir;
  write(dir.path() / "cfg" / "a.cfg", kQuickAlm);
  write(dir.path() / "cfg" / "b.cfg", "[problem]\nid = P99\n[method]\nname = alm\n");
  write(dir.path() / "cfg" / "c.cfg", kQuickAlm);
  std::ostringstream log;
  const SuiteOutcome o = run_suite(dir.path() / "cfg", Overrides{.output_dir = dir.path() / "out"}, log);
  ASSERT_EQ(o.entries.size(), 3u);
  EXPECT_EQ(o.entries[0].status, "ok");
  EXPECT_EQ(o.entries[1].status, "invalid");
  EXPECT_NE(o.entries[1].message.find("unknown problem"), std::string::npos);
  EXPECT_EQ(o.entries[2].status, "ok");
  EXPECT_EQ(o.exit_code, kExitValidation);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "a" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "c" / "report.json"));
  const std::string aggregate = read(o.aggregate_path);
  EXPECT_EQ(o.aggregate_path, dir.path() / "out" / "aggregate.json");
  EXPECT_NE(aggregate.find("\"b.cfg\""), std::string::npos);
  EXPECT_NE(aggregate.find("\"invalid\""), std::string::npos);
}

TEST(Suite, DuplicateOutputsRefusedBeforeAnyRun) {
  ScratchDir dir;
  std::string text = kQuickAlm;
  text.insert(text.find("seed = 5\n") + 9, "output = " + (dir.path() / "same").string() + "\n");
  write(dir.path() / "cfg" / "a.cfg", text);
  write(dir.path() / "cfg" / "b.cfg", text);
  std::ostringstream log;
  EXPECT_THROW(run_suite(dir.path() / "cfg", Overrides{}, log), InputError);
  EXPECT_FALSE(fs::exists(dir.path() / "same"));
}

TEST(Suite, EmptyDirectoryIsAnInputError) {
  ScratchDir dir;
  std::ostringstream log;
  EXPECT_THROW(run_suite(dir.path(), Overrides{}, log), InputError);
  EXPECT_THROW(run_suite(dir.path() / "missing", Overrides{}, log), InputError);
}

TEST(Suite, CheckFailuresGiveExitThree) {
  ScratchDir dir;
  // Two iterations of P6 leave the iterates far from feasible.
  write(dir.path() / "cfg" / "p6.cfg",
        "[problem]\nid = P6\n[method]\nname = penalty\n[epsilon]\nschedule = geometric:0.001:0.5\n[run]\niterations = 3\n"
        "[monitor]\nwindow = 2\n");
  std::ostringstream log;
  const SuiteOutcome o = run_suite(dir.path() / "cfg", Overrides{.output_dir = dir.path() / "out"}, log);
  EXPECT_EQ(o.entries[0].status, "check-failure");
  EXPECT_EQ(o.exit_code, kExitCheckFailure);
  EXPECT_NE(log.str().find("penalty P6 3 "), std::string::npos);
}

}  // namespace
