#include <benchmark/benchmark.h>

#include "clansim/clansim.hpp"

using namespace clansim;

namespace {

void BM_EnumerateWR(benchmark::State& state) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  std::vector<Location> sites;
  const int n = static_cast<int>(state.range(0));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) sites.push_back(Location{static_cast<double>(x), static_cast<double>(y)});
  const Region volume = Region::sites(sites);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_gibbs(*wr, volume, ParticleConfiguration()).normalizer);
}
BENCHMARK(BM_EnumerateWR)->DenseRange(2, 3);

void BM_ContourGas(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::within_box(n));
  const PeierlsContours model(0.8, catalog);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_contour_gas(model, n).normalizer);
}
BENCHMARK(BM_ContourGas)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_ContourCatalog(benchmark::State& state) {
  const int lmax = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ContourCatalog::enumerate(lmax).counts());
}
BENCHMARK(BM_ContourCatalog)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

}  // namespace
