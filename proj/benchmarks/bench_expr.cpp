#include <benchmark/benchmark.h>

#include "qgdiff/expr.hpp"

namespace {

constexpr const char* kSource = "(1 + pi^2) * cos(pi * x) * exp(-t) + max(0, sin(3*x) - 0.5) / (1 + x^2)";

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qgdiff::expr::parse(kSource));
}
BENCHMARK(BM_Parse);

void BM_Evaluate(benchmark::State& state) {
  const auto e = qgdiff::expr::parse(kSource);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.evaluate({x, 0.5}));
    x += 1e-3;
  }
}
BENCHMARK(BM_Evaluate);

}  // namespace
