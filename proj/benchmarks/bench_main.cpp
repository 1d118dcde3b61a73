#include <random>

#include <benchmark/benchmark.h>

#include "dualscheme/cones.hpp"
#include "dualscheme/expression.hpp"
#include "dualscheme/inner_solver.hpp"
#include "dualscheme/merit.hpp"
#include "dualscheme/problems.hpp"

namespace {

using namespace dualscheme;

Vec random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Vec y(dim);
  for (int i = 0; i < dim; ++i) y[i] = u(rng);
  return y;
}

void BM_ProjectSecondOrder(benchmark::State& state) {
  const Cone k = Cone::second_order(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  const Vec y = random_point(rng, k.dim());
  for (auto _ : state) benchmark::DoNotOptimize(project(k, y));
}
BENCHMARK(BM_ProjectSecondOrder)->Arg(3)->Arg(16)->Arg(128);

void BM_ProjectProduct(benchmark::State& state) {
  const Cone k = Cone::parse("soc:3 x orthant-:4 x zero:2");
  std::mt19937_64 rng(2);
  const Vec y = random_point(rng, k.dim());
  for (auto _ : state) benchmark::DoNotOptimize(project(k, y));
}
BENCHMARK(BM_ProjectProduct);

void BM_ExpressionEval(benchmark::State& state) {
  const Expression e = Expression::parse("(x1 - 1)^2 + 3*sin(x2) * exp(-x1*x2) + sqrt(x1^2 + x2^2 + 1)", 2);
  Vec x(2);
  x << 0.3, -0.7;
  for (auto _ : state) benchmark::DoNotOptimize(e(x));
}
BENCHMARK(BM_ExpressionEval);

void BM_MeritEval(benchmark::State& state) {
  const ProblemSpec p = library_problem("P5");
  const MeritParam mu = WeightedParam{Vec::Ones(1), Vec::Ones(1), 0.25};
  Vec x(2);
  x << 0.4, 0.6;
  for (auto _ : state) benchmark::DoNotOptimize(merit_eval(p, x, mu));
}
BENCHMARK(BM_MeritEval);

void BM_SolveSubproblem(benchmark::State& state) {
  const ProblemSpec p = library_problem(state.range(0) == 1 ? "P1" : "P4");
  const MeritParam mu = state.range(0) == 1 ? MeritParam{MultiplierParam{Vec::Zero(1), 2.0}}
                                            : MeritParam{MultiplierParam{Vec::Zero(3), 1.0}};
  for (auto _ : state) {
    SolveRequest req{p, mu, 1e-4, 1, std::nullopt, {}};
    benchmark::DoNotOptimize(solve_subproblem(req));
  }
}
BENCHMARK(BM_SolveSubproblem)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
