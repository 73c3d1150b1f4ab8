#include <benchmark/benchmark.h>

#include <cmath>

#include "qgdiff/edge_solver.hpp"

namespace {

qgdiff::EdgeBVP problem(std::size_t cells, double p, qgdiff::Nonlinearity gamma) {
  qgdiff::EdgeBVP b;
  b.p = p;
  b.gamma = std::move(gamma);
  b.a = 0.3;
  b.b = -0.2;
  for (std::size_t j = 0; j <= cells; ++j) b.g.push_back(std::sin(4.0 * static_cast<double>(j) / cells) + 0.2);
  return b;
}

void BM_EdgeLinear(benchmark::State& state) {
  const auto b = problem(static_cast<std::size_t>(state.range(0)), 2.0, qgdiff::Nonlinearity::identity());
  for (auto _ : state) benchmark::DoNotOptimize(qgdiff::solve_edge_bvp(b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EdgeLinear)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_EdgeDegenerate(benchmark::State& state) {
  // p = 4 with a square-root nonlinearity; exercises the continuation path
  const auto b = problem(static_cast<std::size_t>(state.range(0)), 4.0, qgdiff::Nonlinearity::power(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(qgdiff::solve_edge_bvp(b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EdgeDegenerate)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_FluxShoot(benchmark::State& state) {
  const auto b = problem(static_cast<std::size_t>(state.range(0)), 3.0, qgdiff::Nonlinearity::power(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(qgdiff::flux_shoot(b, qgdiff::Side::Right, 0.4));
}
BENCHMARK(BM_FluxShoot)->Arg(64)->Arg(256);

}  // namespace
