#include <benchmark/benchmark.h>

#include "tvpt/experiments.hpp"
#include "tvpt/geometry.hpp"
#include "tvpt/pattern.hpp"
#include "tvpt/random.hpp"
#include "tvpt/solver.hpp"

namespace {

using tvpt::Index;

void BM_ScaledDistance(benchmark::State& state, tvpt::InnerSolver solver) {
  const Index n = state.range(0);
  const tvpt::GradientPattern pattern = tvpt::random_pattern(n, n / 10, 1);
  const tvpt::Vector g = tvpt::gaussian_sample(n, 2, 0);
  tvpt::DistanceOptions options;
  options.solver = solver;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tvpt::dist_sq_scaled_subdiff(g, 1.0, pattern, options).value);
  }
  state.SetComplexityN(n);
}
BENCHMARK_CAPTURE(BM_ScaledDistance, exact, tvpt::InnerSolver::kExact)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK_CAPTURE(BM_ScaledDistance, projected_gradient, tvpt::InnerSolver::kProjectedGradient)
    ->RangeMultiplier(4)
    ->Range(64, 1024);

void BM_ConeDistance(benchmark::State& state) {
  const Index n = state.range(0);
  const tvpt::GradientPattern pattern = tvpt::random_pattern(n, n / 10, 3);
  const tvpt::Vector g = tvpt::gaussian_sample(n, 4, 0);
  for (auto _ : state) benchmark::DoNotOptimize(tvpt::dist_sq_cone(g, pattern).value);
}
BENCHMARK(BM_ConeDistance)->RangeMultiplier(4)->Range(64, 4096);

void BM_ConstructV0(benchmark::State& state) {
  const Index n = state.range(0);
  const tvpt::GradientPattern pattern = tvpt::random_pattern(n, n / 5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(tvpt::construct_v0(pattern).data());
}
BENCHMARK(BM_ConstructV0)->RangeMultiplier(8)->Range(64, 1 << 15);

void BM_Solve(benchmark::State& state, tvpt::ConstraintMode mode) {
  const Index n = state.range(0);
  const tvpt::Vector x = tvpt::random_sparse_gradient_signal(n, n / 20, 6);
  // Twice the predicted transition for eps = 0.05, so solves converge.
  const tvpt::Matrix A = tvpt::random_gaussian_matrix(n / 2, n, 7);
  const tvpt::Vector y = A * x;
  tvpt::SolveOptions options;
  options.mode = mode;
  for (auto _ : state) {
    const tvpt::SolveReport report = tvpt::solve_tv_equality(A, y, options);
    state.counters["iterations"] = report.iterations;
    benchmark::DoNotOptimize(report.objective);
  }
}
BENCHMARK_CAPTURE(BM_Solve, projection, tvpt::ConstraintMode::kProjection)
    ->Arg(100)
    ->Arg(200)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, dual_block, tvpt::ConstraintMode::kDualBlock)
    ->Arg(100)
    ->Arg(200)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
