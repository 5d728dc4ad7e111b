// Copyright 2026 The ciplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ciplan/random.hpp"
#include "ciplan/stats/hypothesis.hpp"
#include "ciplan/stats/power.hpp"

using namespace ciplan;
using namespace ciplan::stats;

namespace {

void BM_ExactPmf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_exact_pmf(n, n));
}
BENCHMARK(BM_ExactPmf)->Arg(10)->Arg(20)->Arg(40);

void BM_MannWhitneyNormal(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<double> a(37), b(11);
  for (auto& x : a) x = standard_normal(rng);
  for (auto& x : b) x = standard_normal(rng) + 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mann_whitney_u(a, b, MwuVariant::kNormal));
  }
}
BENCHMARK(BM_MannWhitneyNormal);

void BM_PowerCurvePoint(benchmark::State& state) {
  PowerOptions o;
  o.replicates = 20000;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mwu_power(401, 41, 432, 19, 37, 14, o));
  }
}
BENCHMARK(BM_PowerCurvePoint)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
