#include <benchmark/benchmark.h>

#include "drsplit/planner.hpp"

using namespace drsplit;

namespace {

// the covariance experiment's moduli under ordering 1-2-3-4
const PlannerInput kProfile{{0.0, 1.0, -0.1, -0.1}, Weights::equal(3), 1.0, std::nullopt};

void BM_OptimalDelta(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimal_delta(kProfile));
}
BENCHMARK(BM_OptimalDelta);

void BM_BruteForceDelta(benchmark::State& state) {
  const int levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_delta(kProfile, 30, levels));
}
BENCHMARK(BM_BruteForceDelta)->Arg(1)->Arg(40);

}  // namespace
