#include <random>

#include <benchmark/benchmark.h>

#include "pathcause/estimator.hpp"
#include "pathcause/ground_truth.hpp"

using namespace pathcause;

namespace {

std::vector<Symbol> bits(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<Symbol> out(n);
  for (auto& s : out) s = rng() & 1;
  return out;
}

}  // namespace

// One predict + update on the product grid; arg = points per axis.
static void BM_GridUpdate(benchmark::State& state) {
  const ContextSpec spec{1, 1, 0, 2};
  GridPredictor g(spec, ParameterGrid::uniform(static_cast<std::size_t>(state.range(0))), ShrinkConfig{});
  const auto x = bits(1, 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    const ContextId ctx = (x[i % 4096] << 1) | x[(i + 1) % 4096];
    benchmark::DoNotOptimize(g.predict(ctx));
    g.update(ctx, x[(i + 2) % 4096]);
    ++i;
  }
  state.counters["cells"] = static_cast<double>(g.cells());
}
BENCHMARK(BM_GridUpdate)->Arg(7)->Arg(11)->Arg(21);

static void BM_AddHalfUpdate(benchmark::State& state) {
  AddHalfPredictor p(ContextSpec{2, 2, 0, 2});
  const auto x = bits(2, 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    const ContextId ctx = i % 16;
    benchmark::DoNotOptimize(p.predict(ctx));
    p.update(ctx, x[i % 4096]);
    ++i;
  }
}
BENCHMARK(BM_AddHalfUpdate);

// Full estimator pass over n rounds, default grid predictors.
static void BM_EstimatorTrace(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = simulate(example1_params(n), 3);
  for (auto _ : state) benchmark::DoNotOptimize(run_trace(s.x, s.y, {}, EstimatorConfig{}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_EstimatorTrace)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_TrueTraceFilter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ProcessParams p;
  p.n = n;
  p.change_point = n / 2;
  p.regime2.theta_xy = 2.0;
  const auto s = simulate(p, 4);
  for (auto _ : state) benchmark::DoNotOptimize(true_causal_trace(p, s.x, s.y, Direction::kYtoX));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_TrueTraceFilter)->Arg(10000);

static void BM_BruteForce(benchmark::State& state) {
  const auto p = example1_params(32);
  const auto h = bits(5, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_restricted(p, h));
}
BENCHMARK(BM_BruteForce)->Arg(12)->Arg(16);
BENCHMARK_MAIN();
