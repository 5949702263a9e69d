#include <benchmark/benchmark.h>

#include "drsplit/covlab.hpp"
#include "drsplit/engine.hpp"
#include "drsplit/planner.hpp"

using namespace drsplit;

namespace {

void BM_DrStep(benchmark::State& state) {
  covlab::ExperimentConfig cfg;
  cfg.p = static_cast<int>(state.range(0));
  const covlab::Instance inst = covlab::generate_instance(cfg.p, cfg.K, cfg.n, 1);
  const InclusionProblem prob = covlab::build_problem({1, 4, 3, 2}, inst.y, cfg);
  DrParams p;
  p.weights = Weights::equal(3);
  p.lambda = 0.95 * optimal_delta(PlannerInput{prob.sigmas(), p.weights, 1.0, std::nullopt})
                        .lambda_bar_star;
  p.variant = state.range(1) == 0 ? Variant::FG : Variant::GF;
  DrState s = initial_state(embed(inst.y, 3));
  for (auto _ : state) {
    s = dr_step(p, prob, s);
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_DrStep)->Args({60, 0})->Args({60, 1})->Args({200, 0});

void BM_DeskRun(benchmark::State& state) {
  covlab::ExperimentConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(covlab::run_one(cfg, {1, 4, 3, 2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1));
}
BENCHMARK(BM_DeskRun)->Unit(benchmark::kMillisecond);

}  // namespace
