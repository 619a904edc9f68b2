#include <benchmark/benchmark.h>

#include "gmerton/driver.hpp"
#include "gmerton/market.hpp"
#include "gmerton/strategy.hpp"

namespace {

using namespace gmerton;

void BM_SimulateDriver(benchmark::State& state) {
  const VolatilityBand band(0.5, 1.5);
  const TimeGrid grid = make_grid(1.0, static_cast<std::size_t>(state.range(0)));
  const auto control = gen_control(ControlSpec::uniform_iid(), band, grid, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_driver(grid, control, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDriver)->Arg(50)->Arg(250)->Arg(1000);

void BM_WealthPath(benchmark::State& state) {
  const MarketParams p;
  const VolatilityBand band(0.5, 1.5);
  const TimeGrid grid = make_grid(1.0, 250);
  const DriverPath d =
      simulate_driver(grid, gen_control(ControlSpec::bang_bang(0.1), band, grid, 2), 3);
  const Strategy opt = optimal_log_strategy(p);
  for (auto _ : state) benchmark::DoNotOptimize(wealth_path(p, opt, d, 1.0));
}
BENCHMARK(BM_WealthPath);

void BM_EstimateSublinear(benchmark::State& state) {
  const ScenarioFamily family(VolatilityBand(0.5, 1.5),
                              {ControlSpec::bang_bang(0.1), ControlSpec::uniform_iid()});
  const TimeGrid grid = make_grid(1.0, 50);
  const auto paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_sublinear(
        [](const DriverPath& p) { return p.B.back() * p.B.back(); }, family, grid, paths, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(BM_EstimateSublinear)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
