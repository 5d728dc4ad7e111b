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

#include "ciplan/array/array_model.hpp"
#include "ciplan/geometry/scene_index.hpp"
#include "ciplan/geometry/synth.hpp"
#include "ciplan/plan/plan.hpp"
#include "ciplan/plan/registration.hpp"

using namespace ciplan;

namespace {

const geometry::SceneIndex& index() {
  static const geometry::SceneIndex idx(geometry::synth_cochlea({}));
  return idx;
}

void BM_Register(benchmark::State& state) {
  const auto shape = array::build_resting_shape({});
  plan::RegistrationOptions opts;
  opts.random_starts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(plan::register_array(index(), shape, opts));
}
BENCHMARK(BM_Register)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CandidatePlans(benchmark::State& state) {
  const auto shape = array::build_resting_shape({});
  for (auto _ : state) benchmark::DoNotOptimize(plan::candidate_plans(index(), shape, {}));
}
BENCHMARK(BM_CandidatePlans)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
