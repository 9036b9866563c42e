#include <benchmark/benchmark.h>

#include "uinfo/blackwell.hpp"
#include "uinfo/bounds.hpp"
#include "uinfo/fixtures.hpp"
#include "uinfo/random.hpp"
#include "uinfo/simplex.hpp"
#include "uinfo/ui_solver.hpp"

using namespace uinfo;

namespace {
const Roles kX012{{"X0"}, {"X1"}, {"X2"}};
}

static void BM_ComputeUi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const JointDist d = random_dirichlet(std::vector<int>{n, n, n}, 1.0, 42);
  for (auto _ : state) benchmark::DoNotOptimize(compute_ui(d, kX012).ui);
}
BENCHMARK(BM_ComputeUi)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_UiOracle(benchmark::State& state) {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 42);
  for (auto _ : state) benchmark::DoNotOptimize(compute_ui_oracle(d, kX012).ui);
}
BENCHMARK(BM_UiOracle)->Unit(benchmark::kMillisecond);

static void BM_TransportationLp(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  const auto rows = rng.dirichlet(n, 1.0);
  const auto cols = rng.dirichlet(n, 1.0);
  std::vector<double> cost(n * n);
  for (double& c : cost) c = rng.uniform(-10.0, 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_transportation(n, n, cost, rows, cols));
}
BENCHMARK(BM_TransportationLp)->Arg(3)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);

static void BM_Blackwell(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const JointDist d = random_dirichlet(std::vector<int>{n, n, n}, 1.0, 9);
  for (auto _ : state) benchmark::DoNotOptimize(blackwell_dominates(d, kX012).residual);
}
BENCHMARK(BM_Blackwell)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

static void BM_Cmi(benchmark::State& state) {
  const JointDist d = random_dirichlet(std::vector<int>{4, 4, 4, 4}, 1.0, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(cmi(d, {"X0"}, {"X1", "X2"}, {"X3"}));
}
BENCHMARK(BM_Cmi)->Unit(benchmark::kMicrosecond);

static void BM_OneWayRate(benchmark::State& state) {
  const JointDist d = random_dirichlet(std::vector<int>{2, 2, 2}, 1.0, 21);
  BoundsOptions opts;
  opts.restarts = 4;
  opts.max_steps = 300;
  for (auto _ : state) benchmark::DoNotOptimize(one_way_rate(d, kX012, opts).value);
}
BENCHMARK(BM_OneWayRate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
