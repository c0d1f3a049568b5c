// OpenMP kernels against their serial references.
#include <vector>

#include <benchmark/benchmark.h>

#include "distclust/geometry.hpp"
#include "distclust/harness.hpp"

namespace {

using namespace distclust;

struct Instance {
  Dataset points;
  CenterSet centers;
};

const Instance& instance(std::size_t n) {
  static std::vector<std::pair<std::size_t, Instance>> cache;
  for (const auto& [size, inst] : cache)
    if (size == n) return inst;
  MixtureSpec spec;
  spec.k = 8;
  spec.points_per_cluster = n / 8;
  spec.d = 16;
  Instance inst;
  inst.points = gen_gaussian_mixture(spec).points;
  for (std::size_t i = 0; i < 32; ++i) inst.centers.add(inst.points[i * 7].coords);
  cache.emplace_back(n, std::move(inst));
  return cache.back().second;
}

void BM_ClusteringCost(benchmark::State& state) {
  const Instance& in = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(clustering_cost(in.points, in.centers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ClusteringCostSerial(benchmark::State& state) {
  const Instance& in = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::clustering_cost(in.points, in.centers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_UpdateMinCosts(benchmark::State& state) {
  const Instance& in = instance(static_cast<std::size_t>(state.range(0)));
  std::vector<double> m(in.points.size(), 1e300);
  for (auto _ : state) {
    update_min_costs(in.points, in.centers[0], 2.0, m);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_UpdateMinCostsSerial(benchmark::State& state) {
  const Instance& in = instance(static_cast<std::size_t>(state.range(0)));
  std::vector<double> m(in.points.size(), 1e300);
  for (auto _ : state) {
    serial::update_min_costs(in.points, in.centers[0], 2.0, m);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ClusteringCost)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_ClusteringCostSerial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_UpdateMinCosts)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_UpdateMinCostsSerial)->Arg(1 << 12)->Arg(1 << 16);

BENCHMARK_MAIN();
