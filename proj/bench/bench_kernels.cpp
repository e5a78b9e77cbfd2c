// Copyright 2026 The apselect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ap/kernels.hpp"
#include "ap/metrics.hpp"

namespace {

using namespace ap;

BasisPtr basis() {
  return std::make_shared<const FrequencyBasis>(std::vector<double>{1.0, std::sqrt(2.0)});
}

void BM_GridSum(benchmark::State& state) {
  const auto g = kernels::midpoint_grid(static_cast<double>(state.range(0)), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_sum(g, [](double t) { return std::sin(t) * std::sin(t); }));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.n));
}

void BM_GridSumSerial(benchmark::State& state) {
  const auto g = kernels::midpoint_grid(static_cast<double>(state.range(0)), 1e-3);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::grid_sum_serial(g, [](double t) { return std::sin(t) * std::sin(t); }));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.n));
}

void BM_WindowMax(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::window_sum_max(n, 100, [](std::size_t i) { return std::sin(0.01 * i); }));
}

void BM_WindowMaxSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::window_sum_max_serial(n, 100, [](std::size_t i) { return std::sin(0.01 * i); }));
}

AveragingScheme scheme(benchmark::State& state) {
  return AveragingScheme{{static_cast<double>(state.range(0))}, 1e-3, 1, "pairwise"};
}

void BM_AverageBy(benchmark::State& state) {
  const auto s = scheme(state);
  const FuncExpr f = sum(sine(basis(), {1, 0}), sine(basis(), {0, 1}));
  for (auto _ : state) benchmark::DoNotOptimize(average_by(s, [&](double t) { return std::abs(f.eval_scalar(t)); }));
}

void BM_AverageBySerial(benchmark::State& state) {
  const auto s = scheme(state);
  const FuncExpr f = sum(sine(basis(), {1, 0}), sine(basis(), {0, 1}));
  for (auto _ : state)
    benchmark::DoNotOptimize(average_by_serial(s, [&](double t) { return std::abs(f.eval_scalar(t)); }));
}

void BM_FourierPhasor(benchmark::State& state) {
  const auto s = scheme(state);
  const FuncExpr f = sum(sine(basis(), {1, 0}), sine(basis(), {1, 1}));
  const std::vector<double> lambdas{1.0, std::sqrt(2.0), 1.0 + std::sqrt(2.0), 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(fourier_bohr_many(f, lambdas, s));
}

void BM_FourierReference(benchmark::State& state) {
  const auto s = scheme(state);
  const FuncExpr f = sum(sine(basis(), {1, 0}), sine(basis(), {1, 1}));
  const std::vector<double> lambdas{1.0, std::sqrt(2.0), 1.0 + std::sqrt(2.0), 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(fourier_bohr_reference(f, lambdas, s));
}

}  // namespace

BENCHMARK(BM_GridSum)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSumSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowMax)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowMaxSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AverageBy)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AverageBySerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierPhasor)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierReference)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
