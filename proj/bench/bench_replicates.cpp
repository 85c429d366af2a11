// Serial reference against the OpenMP replicate map on two workloads:
// independent walks (the total-variation proxy) and D_inf singular values.

#include <benchmark/benchmark.h>

#include "kaclab/induced_map.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/randmat.hpp"
#include "kaclab/walk.hpp"

using namespace kaclab;

namespace {

constexpr std::int64_t kReplicates = 256;

double walk_replicate(std::int64_t r) {
  Rng rng = make_stream(7, "bench_walk", static_cast<std::uint64_t>(r));
  WalkState st = WalkState::identity(5);
  for (int t = 0; t < 400; ++t) step(st, random_update(5, rng));
  return st.X(0, 0);
}

double sigma_replicate(std::int64_t r) {
  Rng rng = make_stream(7, "bench_sigma", static_cast<std::uint64_t>(r));
  return singular_values(d_infinity(5, rng))(0);
}

void BM_WalkSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial_map(kReplicates, walk_replicate));
  state.SetItemsProcessed(state.iterations() * kReplicates);
}

void BM_WalkParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parallel_map(kReplicates, walk_replicate, threads));
  state.SetItemsProcessed(state.iterations() * kReplicates);
}

void BM_SigmaSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial_map(kReplicates, sigma_replicate));
  state.SetItemsProcessed(state.iterations() * kReplicates);
}

void BM_SigmaParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parallel_map(kReplicates, sigma_replicate, threads));
  state.SetItemsProcessed(state.iterations() * kReplicates);
}

}  // namespace

BENCHMARK(BM_WalkSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WalkParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SigmaSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SigmaParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
