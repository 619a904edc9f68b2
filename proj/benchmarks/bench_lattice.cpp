#include <benchmark/benchmark.h>

#include <cmath>

#include "gmerton/diagnostics.hpp"
#include "gmerton/lattice.hpp"
#include "gmerton/strategy.hpp"

namespace {

using namespace gmerton;

void BM_GExpectation(benchmark::State& state) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, static_cast<std::size_t>(state.range(0)));
  const NodeFunction f = [](const LatticeNode& x) { return std::cos(x.B) + x.QV; };
  for (auto _ : state) benchmark::DoNotOptimize(g_expectation(tree, f, ValuationMode::Upper));
}
BENCHMARK(BM_GExpectation)->DenseRange(4, 12, 4)->Unit(benchmark::kMillisecond);

void BM_BruteForceOptimal(benchmark::State& state) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, static_cast<std::size_t>(state.range(0)));
  const MarketParams p;
  const auto grid = fraction_grid(-1.0, 8.0, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimal(tree, p, grid));
}
BENCHMARK(BM_BruteForceOptimal)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SufficientCondition(benchmark::State& state) {
  const MarketParams p;
  const Strategy opt = optimal_log_strategy(p);
  const LatticeSpec spec{VolatilityBand(0.5, 1.5), 1.0, static_cast<std::size_t>(state.range(0))};
  const std::vector<Strategy> alts{zero_strategy(), constant_strategy(1.0),
                                   affine_strategy(opt, 2.0, 0.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sufficient_condition_check(p, opt, alts, spec, 1.0));
  }
}
BENCHMARK(BM_SufficientCondition)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
