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

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ciplan/geometry/types.hpp"

namespace ciplan::geometry {

// Surface-coincident points within this distance count as contained.
inline constexpr double kSurfaceTolerance = 1e-6;

struct ClosestPoint {
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
  int triangle = -1;
  Vec3 face_normal = Vec3::Zero();
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  double squared_distance(const Vec3& p) const;
  double squared_distance(const Aabb& b) const;
};

// Closest point on triangle abc to p (Voronoi-region walk).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

// Closest points between segments; s and t are the parameters on each.
struct SegmentPair {
  double s = 0.0;
  double t = 0.0;
  double distance = 0.0;
};
SegmentPair closest_segment_segment(const Segment& p, const Segment& q);

double segment_triangle_distance(const Segment& s, const Vec3& a,
                                 const Vec3& b, const Vec3& c);

// Immutable bounding-volume hierarchy over a triangle mesh. Safe for
// concurrent queries once constructed.
class MeshIndex {
 public:
  explicit MeshIndex(TriMesh mesh);

  const TriMesh& mesh() const { return mesh_; }
  bool watertight() const { return watertight_; }

  ClosestPoint closest(const Vec3& p) const;
  double distance(const Vec3& p) const { return closest(p).distance; }
  double distance(const Segment& s) const;

  // Ray-parity containment; throws kTopology for open meshes.
  bool contains(const Vec3& p) const;

  // Number of ray crossings from p along dir; -1 when the ray grazes an edge
  // or vertex and the count is unreliable.
  int crossings(const Vec3& p, const Vec3& dir) const;

  // Distance along dir to the nearest surface hit, if any.
  std::optional<double> first_hit(const Vec3& p, const Vec3& dir) const;

 private:
  struct Node {
    Aabb box;
    std::int32_t left = -1;   // child index, or -1 for leaves
    std::int32_t right = -1;
    std::int32_t first = 0;   // leaf range into order_
    std::int32_t count = 0;
  };

  std::int32_t build(std::int32_t first, std::int32_t count, int depth);
  Aabb triangle_box(int tri) const;

  TriMesh mesh_;
  bool watertight_ = false;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<Vec3> centroids_;
};

double distance_to_mesh(const TriMesh& mesh, const Vec3& p);
bool contains(const TriMesh& mesh, const Vec3& p);

}  // namespace ciplan::geometry
