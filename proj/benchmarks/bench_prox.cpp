#include <benchmark/benchmark.h>

#include <random>

#include "drsplit/prox.hpp"

using namespace drsplit;

namespace {

Point random_symmetric(Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(g);
  return Point::symmetric(m);
}

void BM_ProxPhiScalar(benchmark::State& state) {
  double t = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_phi_scalar(t, 1.0, 0.3));
    t = t > 4.0 ? -4.0 : t + 0.01;
  }
}
BENCHMARK(BM_ProxPhiScalar);

void BM_ProxPsd(benchmark::State& state) {
  const Point x = random_symmetric(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(prox_psd(x));
}
BENCHMARK(BM_ProxPsd)->Arg(20)->Arg(60)->Arg(200);

void BM_ProxPhiSpectral(benchmark::State& state) {
  const Point x = random_symmetric(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(prox_phi_spectral(x, 1.0, 0.1, 1.5));
}
BENCHMARK(BM_ProxPhiSpectral)->Arg(20)->Arg(60)->Arg(200);

void BM_ProxPhiElementwise(benchmark::State& state) {
  const Point x = random_symmetric(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(prox_phi_elementwise(x, 1.0, 0.1, 1.5));
}
BENCHMARK(BM_ProxPhiElementwise)->Arg(60)->Arg(200);

}  // namespace
