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

#include "ciplan/geometry/mesh_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "ciplan/error.hpp"

namespace ciplan::geometry {
namespace {

constexpr int kLeafSize = 4;

bool ray_box_hit(const Aabb& box, const Vec3& origin, const Vec3& inv_dir) {
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    double t1 = (box.lo[k] - origin[k]) * inv_dir[k];
    double t2 = (box.hi[k] - origin[k]) * inv_dir[k];
    if (std::isnan(t1) || std::isnan(t2)) {
      // Ray parallel to this slab and origin exactly on its boundary.
      if (origin[k] < box.lo[k] || origin[k] > box.hi[k]) return false;
      continue;
    }
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  return true;
}

enum class RayHit { kMiss, kHit, kGrazing };

// Moller-Trumbore. Reports grazing when the hit lands within eps of an edge.
RayHit ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                    const Vec3& b, const Vec3& c) {
  constexpr double kEdgeEps = 1e-10;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  const double scale = e1.norm() * e2.norm();
  if (std::abs(det) <= 1e-14 * scale) return RayHit::kMiss;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < -kEdgeEps || u > 1.0 + kEdgeEps) return RayHit::kMiss;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < -kEdgeEps || u + v > 1.0 + kEdgeEps) return RayHit::kMiss;
  const double t = e2.dot(qvec) * inv_det;
  if (t <= 0.0) return RayHit::kMiss;
  if (u < kEdgeEps || v < kEdgeEps || u + v > 1.0 - kEdgeEps) {
    return RayHit::kGrazing;
  }
  return RayHit::kHit;
}

// Ray parameter of the hit with triangle abc, edges inclusive.
std::optional<double> ray_triangle_t(const Vec3& origin, const Vec3& dir,
                                     const Vec3& a, const Vec3& b,
                                     const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) <= 1e-14 * e1.norm() * e2.norm()) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv_det;
  if (t < 0.0) return std::nullopt;
  return t;
}

}  // namespace

double Aabb::squared_distance(const Vec3& p) const {
  const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
  return d.squaredNorm();
}

double Aabb::squared_distance(const Aabb& b) const {
  const Vec3 d = (lo - b.hi).cwiseMax(b.lo - hi).cwiseMax(Vec3::Zero());
  return d.squaredNorm();
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + (d1 / (d1 - d3)) * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + (d2 / (d2 - d6)) * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

SegmentPair closest_segment_segment(const Segment& p, const Segment& q) {
  const Vec3 d1 = p.b - p.a;
  const Vec3 d2 = q.b - q.a;
  const Vec3 r = p.a - q.a;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kEps = 1e-300;

  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    // both degenerate
  } else if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0)
                                : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 c1 = p.a + s * d1;
  const Vec3 c2 = q.a + t * d2;
  return {s, t, (c1 - c2).norm()};
}

double segment_triangle_distance(const Segment& s, const Vec3& a,
                                 const Vec3& b, const Vec3& c) {
  // Segment piercing the triangle.
  const Vec3 dir = s.b - s.a;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) > 1e-14 * e1.norm() * e2.norm() * dir.norm()) {
    const Vec3 tvec = s.a - a;
    const double u = tvec.dot(pvec) / det;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) / det;
    const double t = e2.dot(qvec) / det;
    if (u >= 0.0 && v >= 0.0 && u + v <= 1.0 && t >= 0.0 && t <= 1.0) {
      return 0.0;
    }
  }
  double best = (closest_point_on_triangle(s.a, a, b, c) - s.a).norm();
  best = std::min(best, (closest_point_on_triangle(s.b, a, b, c) - s.b).norm());
  best = std::min(best, closest_segment_segment(s, {a, b}).distance);
  best = std::min(best, closest_segment_segment(s, {b, c}).distance);
  best = std::min(best, closest_segment_segment(s, {c, a}).distance);
  return best;
}

MeshIndex::MeshIndex(TriMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.empty()) {
    throw Error(ErrorKind::kEmptyGeometry,
                "mesh '" + mesh_.label + "' has no triangles");
  }
  mesh_.validate();
  watertight_ = mesh_.is_watertight();

  const int n = static_cast<int>(mesh_.triangles.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  centroids_.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& t = mesh_.triangles[i];
    centroids_[i] =
        (mesh_.vertices[t[0]] + mesh_.vertices[t[1]] + mesh_.vertices[t[2]]) /
        3.0;
  }
  nodes_.reserve(2 * n / kLeafSize + 1);
  build(0, n, 0);
}

Aabb MeshIndex::triangle_box(int tri) const {
  Aabb box;
  for (int idx : mesh_.triangles[tri]) box.extend(mesh_.vertices[idx]);
  return box;
}

std::int32_t MeshIndex::build(std::int32_t first, std::int32_t count,
                              int depth) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroid_box;
  for (std::int32_t i = first; i < first + count; ++i) {
    box.extend(triangle_box(order_[i]));
    centroid_box.extend(centroids_[order_[i]]);
  }
  nodes_[id].box = box;
  if (count <= kLeafSize || depth > 60) {
    nodes_[id].first = first;
    nodes_[id].count = count;
    return id;
  }
  int axis = 0;
  (centroid_box.hi - centroid_box.lo).maxCoeff(&axis);
  const std::int32_t half = count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + first + half,
                   order_.begin() + first + count, [&](int l, int r) {
                     return centroids_[l][axis] < centroids_[r][axis];
                   });
  const std::int32_t left = build(first, half, depth + 1);
  const std::int32_t right = build(first + half, count - half, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

ClosestPoint MeshIndex::closest(const Vec3& p) const {
  ClosestPoint best;
  double best_sq = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::int32_t>> stack;
  stack.reserve(64);
  stack.emplace_back(nodes_[0].box.squared_distance(p), 0);
  while (!stack.empty()) {
    auto [box_sq, id] = stack.back();
    stack.pop_back();
    if (box_sq > best_sq) continue;
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const int tri = order_[i];
        const auto& t = mesh_.triangles[tri];
        const Vec3 q = closest_point_on_triangle(p, mesh_.vertices[t[0]],
                                                 mesh_.vertices[t[1]],
                                                 mesh_.vertices[t[2]]);
        const double d2 = (q - p).squaredNorm();
        if (d2 < best_sq || (d2 == best_sq && tri < best.triangle)) {
          best_sq = d2;
          best.point = q;
          best.triangle = tri;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(p);
    const double dr = nodes_[node.right].box.squared_distance(p);
    // Push the farther child first so the nearer one is popped next.
    if (dl <= dr) {
      if (dr <= best_sq) stack.emplace_back(dr, node.right);
      if (dl <= best_sq) stack.emplace_back(dl, node.left);
    } else {
      if (dl <= best_sq) stack.emplace_back(dl, node.left);
      if (dr <= best_sq) stack.emplace_back(dr, node.right);
    }
  }
  best.distance = std::sqrt(best_sq);
  const auto& t = mesh_.triangles[best.triangle];
  best.face_normal = (mesh_.vertices[t[1]] - mesh_.vertices[t[0]])
                         .cross(mesh_.vertices[t[2]] - mesh_.vertices[t[0]])
                         .normalized();
  return best;
}

double MeshIndex::distance(const Segment& s) const {
  Aabb seg_box;
  seg_box.extend(s.a);
  seg_box.extend(s.b);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (std::sqrt(node.box.squared_distance(seg_box)) > best) continue;
    if (node.left < 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const auto& t = mesh_.triangles[order_[i]];
        best = std::min(best, segment_triangle_distance(
                                  s, mesh_.vertices[t[0]],
                                  mesh_.vertices[t[1]], mesh_.vertices[t[2]]));
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  return best;
}

int MeshIndex::crossings(const Vec3& p, const Vec3& dir) const {
  const Vec3 inv_dir = dir.cwiseInverse();
  int count = 0;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (!ray_box_hit(node.box, p, inv_dir)) continue;
    if (node.left < 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const auto& t = mesh_.triangles[order_[i]];
        switch (ray_triangle(p, dir, mesh_.vertices[t[0]],
                             mesh_.vertices[t[1]], mesh_.vertices[t[2]])) {
          case RayHit::kHit: ++count; break;
          case RayHit::kGrazing: return -1;
          case RayHit::kMiss: break;
        }
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  return count;
}

std::optional<double> MeshIndex::first_hit(const Vec3& p, const Vec3& dir) const {
  const Vec3 unit = dir.normalized();
  const Vec3 inv_dir = unit.cwiseInverse();
  std::optional<double> best;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (!ray_box_hit(node.box, p, inv_dir)) continue;
    if (node.left < 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const auto& t = mesh_.triangles[order_[i]];
        const auto hit = ray_triangle_t(p, unit, mesh_.vertices[t[0]],
                                        mesh_.vertices[t[1]], mesh_.vertices[t[2]]);
        if (hit && (!best || *hit < *best)) best = hit;
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  return best;
}

bool MeshIndex::contains(const Vec3& p) const {
  if (!watertight_) {
    throw Error(ErrorKind::kTopology,
                "mesh '" + mesh_.label + "' is not watertight");
  }
  if (distance(p) <= kSurfaceTolerance) return true;
  // Irrational-ish directions make edge grazing vanishingly unlikely; retry
  // on the rare graze.
  static const std::array<Vec3, 6> kDirections = {
      Vec3(0.5773502691896258, 0.5773502691896258, 0.5773502691896258),
      Vec3(0.2672612419124244, -0.5345224838248488, 0.8017837257372732),
      Vec3(-0.7071067811865476, 0.4082482904638631, 0.5773502691896258),
      Vec3(0.1386750490563073, 0.9707253433941511, -0.1961161351381840),
      Vec3(-0.4850712500726659, -0.7276068751089989, -0.4850712500726659),
      Vec3(0.9128709291752769, 0.1825741858350554, -0.3651483716701107)};
  for (const Vec3& dir : kDirections) {
    const int c = crossings(p, dir.normalized());
    if (c >= 0) return (c % 2) == 1;
  }
  throw Error(ErrorKind::kTopology,
              "containment undecidable: every probe ray grazed an edge");
}

double distance_to_mesh(const TriMesh& mesh, const Vec3& p) {
  return MeshIndex(mesh).distance(p);
}

bool contains(const TriMesh& mesh, const Vec3& p) {
  return MeshIndex(mesh).contains(p);
}

}  // namespace ciplan::geometry
