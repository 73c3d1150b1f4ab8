#include <benchmark/benchmark.h>

#include "qgdiff/diagnostics.hpp"

namespace {

void run(benchmark::State& state, qgdiff::Method method) {
  const auto battery = qgdiff::standard_battery(static_cast<std::size_t>(state.range(1)));
  const auto& prob = battery[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(prob.name);
  for (auto _ : state) benchmark::DoNotOptimize(qgdiff::solve_elliptic(prob.problem, method));
}

void BM_Monolithic(benchmark::State& state) { run(state, qgdiff::Method::Monolithic); }
void BM_Gluing(benchmark::State& state) { run(state, qgdiff::Method::Gluing); }

BENCHMARK(BM_Monolithic)->ArgsProduct({{0, 1, 2, 3, 4}, {64, 256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gluing)->ArgsProduct({{0, 1, 2, 3, 4}, {64}})->Unit(benchmark::kMillisecond);

}  // namespace
