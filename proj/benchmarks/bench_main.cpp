#include <benchmark/benchmark.h>

#include <random>

#include "cogshare/regions.hpp"
#include "cogshare/sim.hpp"

using namespace cogshare;

namespace {

const ChannelModel kMpr(0.9, 0.8, 0.6, 0.5);

Scenario make_scenario(double lambda1, double lambda2, double p) {
  return Scenario{kMpr, EnergyModel(0.4), ArrivalRates(lambda1, lambda2),
                  AccessPolicy(p)};
}

void BM_SlotStep(benchmark::State& state) {
  const Scenario scenario = make_scenario(0.2, 0.3, 0.5);
  SystemState system;
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    const SlotDraws draws = {u01(rng), u01(rng), u01(rng),
                             u01(rng), u01(rng), u01(rng)};
    benchmark::DoNotOptimize(
        step(system, scenario, SimMode::Original, draws));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SlotStep);

void BM_RunHorizon(benchmark::State& state) {
  SimConfig config{make_scenario(0.2, 0.3, 0.5)};
  config.horizon = state.range(0);
  config.burn_in = config.horizon / 10;
  config.replications = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(config));
  }
  state.SetItemsProcessed(state.iterations() * config.horizon);
}
BENCHMARK(BM_RunHorizon)->Arg(1 << 16)->Arg(1 << 20);

void BM_RegionMembership(benchmark::State& state) {
  const StabilityRegion region = build_region(kMpr, EnergyModel(0.4));
  std::mt19937_64 rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(region.contains(u01(rng) * 0.4, u01(rng)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RegionMembership);

void BM_BoundaryPolyline(benchmark::State& state) {
  const StabilityRegion region = build_region(kMpr, EnergyModel(0.4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(boundary_polyline(region, 257));
  }
}
BENCHMARK(BM_BoundaryPolyline);

void BM_GridPStarOracle(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grid_pstar_oracle(kMpr, EnergyModel(0.4), 0.3, 1001));
  }
}
BENCHMARK(BM_GridPStarOracle);

}  // namespace

BENCHMARK_MAIN();
