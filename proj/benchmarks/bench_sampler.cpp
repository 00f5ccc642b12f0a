#include <benchmark/benchmark.h>

#include "clansim/clansim.hpp"

using namespace clansim;

namespace {

void BM_PerfectSampleDiscreteWR(benchmark::State& state) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  const double side = static_cast<double>(state.range(0));
  const Region w = Region::box(Box::make({0, 0}, {side, side}));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(perfect_sample(*wr, w, seed++).config.size());
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_PerfectSampleDiscreteWR)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_PerfectSampleContinuumWR(benchmark::State& state) {
  auto wr = WidomRowlinson::continuum(2, 0.1, 0.1, 0.5);
  const double side = static_cast<double>(state.range(0));
  const Region w = Region::box(Box::make({0, 0}, {side, side}));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(perfect_sample(*wr, w, seed++).config.size());
}
BENCHMARK(BM_PerfectSampleContinuumWR)->RangeMultiplier(2)->Range(4, 32);

// clan growth as the intensity approaches the diluteness threshold
void BM_ClanNearThreshold(benchmark::State& state) {
  const double lambda = 0.01 * static_cast<double>(state.range(0));
  auto wr = WidomRowlinson::discrete(2, lambda, lambda, 1);
  const Region w = Region::box(Box::make({0, 0}, {8, 8}));
  std::uint64_t seed = 0;
  std::size_t total = 0;
  for (auto _ : state) {
    Substrate s(wr->intensity(), 0.0, seed++);
    const Clan clan = build_clan(s, w, *wr, Relation::kImpact);
    total += clan.size();
    benchmark::DoNotOptimize(clan.size());
  }
  state.counters["clan_size"] = benchmark::Counter(static_cast<double>(total), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_ClanNearThreshold)->DenseRange(2, 10, 2);

void BM_CoupledDiscretization(benchmark::State& state) {
  const auto run = discretization_run(2, 0.1, 0.1, 0.5, dyadic_grid(static_cast<int>(state.range(0))));
  const Region w = Region::box(Box::make({-0.05, -0.05}, {1.05, 1.05}));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(coupled_sample(run, w, seed++).samples.size());
}
BENCHMARK(BM_CoupledDiscretization)->DenseRange(2, 8, 3);

}  // namespace
