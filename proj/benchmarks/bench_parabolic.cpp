#include <benchmark/benchmark.h>

#include <cmath>

#include "qgdiff/diagnostics.hpp"
#include "qgdiff/parabolic.hpp"

namespace {

qgdiff::MetricGraph star(std::size_t cells, qgdiff::Nonlinearity gamma, double p) {
  auto edge = [&](const char* id, const char* from, const char* to) {
    qgdiff::Edge e;
    e.id = id;
    e.from = from;
    e.to = to;
    e.p = p;
    e.gamma = gamma;
    e.cells = cells;
    return e;
  };
  return qgdiff::MetricGraph::build(
      {{"c", "l1", "l2", "l3"}, {edge("e1", "c", "l1"), edge("e2", "c", "l2"), edge("e3", "l3", "c")}, cells});
}

qgdiff::GridFunction initial(const qgdiff::MetricGraph& g) {
  return qgdiff::GridFunction::sample_edgewise(qgdiff::GridLayout::of(g),
                                               [](std::size_t e, double x) { return std::cos(3.0 * x) + 0.2 * e; });
}

void BM_HeatStar(benchmark::State& state) {
  const auto g = star(static_cast<std::size_t>(state.range(0)), qgdiff::Nonlinearity::identity(), 2.0);
  const auto v0 = initial(g);
  qgdiff::ParabolicConfig cfg;
  cfg.keep_records = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qgdiff::solve_parabolic(g, v0, {}, qgdiff::TimeGrid::uniform(0.1, 0.01), cfg));
  }
}
BENCHMARK(BM_HeatStar)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_HeatOracle(benchmark::State& state) {
  const auto g = star(static_cast<std::size_t>(state.range(0)), qgdiff::Nonlinearity::identity(), 2.0);
  const auto v0 = initial(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qgdiff::heat_oracle(g, v0, {}, qgdiff::TimeGrid::uniform(0.1, 0.01)));
  }
}
BENCHMARK(BM_HeatOracle)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PorousStar(benchmark::State& state) {
  const auto g = star(static_cast<std::size_t>(state.range(0)), qgdiff::Nonlinearity::power(3.0), 3.0);
  const auto v0 = initial(g);
  qgdiff::ParabolicConfig cfg;
  cfg.keep_records = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qgdiff::solve_parabolic(g, v0, {}, qgdiff::TimeGrid::uniform(0.1, 0.01), cfg));
  }
}
BENCHMARK(BM_PorousStar)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
