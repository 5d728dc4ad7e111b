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

#include "ciplan/geometry/mesh_index.hpp"
#include "ciplan/geometry/synth.hpp"
#include "ciplan/random.hpp"

using namespace ciplan;
using namespace ciplan::geometry;

namespace {

const CochlearScene& scene() {
  static const CochlearScene s = synth_cochlea({});
  return s;
}

std::vector<Vec3> query_points(const TriMesh& m, int count) {
  Vec3 lo = Vec3::Constant(1e300);
  Vec3 hi = Vec3::Constant(-1e300);
  for (const auto& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::mt19937_64 rng(5);
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) {
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = lo[k] + (hi[k] - lo[k]) * uniform01(rng);
    out.push_back(p);
  }
  return out;
}

void BM_SynthScene(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(synth_cochlea({}));
}
BENCHMARK(BM_SynthScene)->Unit(benchmark::kMillisecond);

void BM_BuildIndex(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(MeshIndex(scene().st));
}
BENCHMARK(BM_BuildIndex)->Unit(benchmark::kMicrosecond);

void BM_DistanceIndexed(benchmark::State& state) {
  const MeshIndex index(scene().st);
  const auto pts = query_points(scene().st, 256);
  size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.distance(pts[i++ % pts.size()]));
}
BENCHMARK(BM_DistanceIndexed);

// Linear scan over all triangles, for comparison with the BVH.
void BM_DistanceLinear(benchmark::State& state) {
  const TriMesh& m = scene().st;
  const auto pts = query_points(m, 256);
  size_t i = 0;
  for (auto _ : state) {
    const Vec3& p = pts[i++ % pts.size()];
    double best = 1e300;
    for (const auto& t : m.triangles) {
      const Vec3 q = closest_point_on_triangle(p, m.vertices[t[0]], m.vertices[t[1]],
                                               m.vertices[t[2]]);
      best = std::min(best, (q - p).squaredNorm());
    }
    benchmark::DoNotOptimize(best);
  }
}
BENCHMARK(BM_DistanceLinear);

void BM_Contains(benchmark::State& state) {
  const MeshIndex index(scene().st);
  const auto pts = query_points(scene().st, 256);
  size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.contains(pts[i++ % pts.size()]));
}
BENCHMARK(BM_Contains);

}  // namespace
