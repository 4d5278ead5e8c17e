#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "latsec/channel.hpp"
#include "latsec/codebook.hpp"
#include "latsec/experiments.hpp"
#include "latsec/infotheory.hpp"

namespace {

latsec::ConstructionALattice lattice(std::int64_t p, std::size_t k, std::size_t n) {
  latsec::LatticeConfig cfg;
  cfg.p = p;
  cfg.k = k;
  cfg.n = n;
  cfg.matrix_seed = 7;
  return latsec::realize(cfg);
}

// args: p, k, n
void BM_Enumerate(benchmark::State& state) {
  const auto lat = lattice(state.range(0), state.range(1), state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(latsec::enumerate_codebook(lat));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(latsec::enumerate_codebook(lat).size()));
}
BENCHMARK(BM_Enumerate)->Args({2, 3, 3})->Args({3, 3, 4})->Args({7, 3, 6});

void BM_MinkowskiSum(benchmark::State& state) {
  const auto set = latsec::enumerate_codebook(lattice(state.range(0), state.range(1), state.range(2))).point_set();
  for (auto _ : state) benchmark::DoNotOptimize(latsec::minkowski_sum(set, set));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size() * set.size()));
}
BENCHMARK(BM_MinkowskiSum)->Args({2, 3, 3})->Args({3, 3, 4})->Args({7, 3, 6});

void BM_BinnedLeakage(benchmark::State& state) {
  const auto cb = latsec::enumerate_codebook(lattice(state.range(0), state.range(1), state.range(2)));
  const auto binned = latsec::assign_bins(cb, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(latsec::leakage_breakdown(binned, cb));
}
BENCHMARK(BM_BinnedLeakage)->Args({2, 3, 3})->Args({3, 3, 4})->Args({7, 3, 6});

void BM_QuantizeCoarse(benchmark::State& state) {
  const auto lat = lattice(3, 2, static_cast<std::size_t>(state.range(0)));
  latsec::RandomStream rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<latsec::RealVec> xs(256, latsec::RealVec(lat.n()));
  for (auto& x : xs)
    for (auto& v : x) v = g(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(latsec::quantize_coarse(xs[i++ % xs.size()], lat));
}
BENCHMARK(BM_QuantizeCoarse)->Arg(2)->Arg(4)->Arg(6);

void BM_NearestFine(benchmark::State& state) {
  const auto lat = lattice(5, 2, static_cast<std::size_t>(state.range(0)));
  latsec::RandomStream rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<latsec::RealVec> xs(256, latsec::RealVec(lat.n()));
  for (auto& x : xs)
    for (auto& v : x) v = g(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(latsec::nearest_fine(xs[i++ % xs.size()], lat));
}
BENCHMARK(BM_NearestFine)->Arg(2)->Arg(4)->Arg(6);

void BM_SimulateWeak(benchmark::State& state) {
  const auto cb = latsec::fit_to_power(latsec::enumerate_codebook(lattice(3, 1, 2)), 1.0);
  latsec::ChannelParams ch;
  ch.a = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(latsec::simulate_weak(cb, ch, 1000, 1));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulateWeak);

}  // namespace

BENCHMARK_MAIN();
