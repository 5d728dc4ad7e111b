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

#include "ciplan/geometry/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "ciplan/error.hpp"

namespace ciplan::geometry {

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis,
                                               double angle_rad,
                                               const Vec3& translation) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
  t.translation = translation;
  return t;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
  RigidTransform out;
  out.rotation = rotation * inner.rotation;
  out.translation = rotation * inner.translation + translation;
  return out;
}

bool RigidTransform::is_rigid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Mat3 should_be_identity = rotation.transpose() * rotation;
  if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

double RigidTransform::rotation_angle_deg() const {
  const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

void TriMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& tri : triangles) {
    for (int idx : tri) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorKind::kValidation,
                    "mesh '" + label + "': triangle index out of range");
      }
    }
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& c = vertices[tri[2]];
    if ((b - a).cross(c - a).norm() <= 1e-14) {
      throw Error(ErrorKind::kValidation,
                  "mesh '" + label + "': degenerate (zero-area) triangle");
    }
  }
}

bool TriMesh::is_watertight() const {
  if (triangles.empty()) return false;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      if (++directed[{a, b}] > 1) return false;
    }
  }
  for (const auto& [edge, count] : directed) {
    auto twin = directed.find({edge.second, edge.first});
    if (twin == directed.end() || twin->second != count) return false;
  }
  return true;
}

void CenterlineTube::validate() const {
  if (centerline.size() < 2) {
    throw Error(ErrorKind::kValidation,
                "tube '" + label + "': centerline needs at least 2 points");
  }
  if (radius.size() != centerline.size()) {
    throw Error(ErrorKind::kValidation,
                "tube '" + label + "': one radius per centerline point");
  }
  for (double r : radius) {
    if (!(r > 0.0)) {
      throw Error(ErrorKind::kValidation,
                  "tube '" + label + "': radius must be positive");
    }
  }
  for (size_t i = 1; i < centerline.size(); ++i) {
    if ((centerline[i] - centerline[i - 1]).norm() <= 0.0) {
      throw Error(ErrorKind::kValidation,
                  "tube '" + label + "': arc length must strictly increase");
    }
  }
}

void CochlearFrame::validate() const {
  auto unit = [](const Vec3& v, const char* name) {
    if (std::abs(v.norm() - 1.0) > 1e-9) {
      throw Error(ErrorKind::kValidation,
                  std::string("frame: ") + name + " is not unit length");
    }
  };
  unit(modiolar_axis, "modiolar_axis");
  unit(rw_plane_normal, "rw_plane_normal");
  unit(zero_angle_ray, "zero_angle_ray");
  if (std::abs(zero_angle_ray.dot(modiolar_axis)) > 1e-9) {
    throw Error(ErrorKind::kValidation,
                "frame: zero_angle_ray not perpendicular to modiolar_axis");
  }
  if (winding != 1 && winding != -1) {
    throw Error(ErrorKind::kValidation, "frame: winding must be +1 or -1");
  }
  // The zero-angle ray must point at the RW center projection.
  Vec3 radial = rw_center - apex_origin;
  radial -= radial.dot(modiolar_axis) * modiolar_axis;
  if (radial.norm() < 1e-9 ||
      radial.normalized().dot(zero_angle_ray) < 1.0 - 1e-9) {
    throw Error(ErrorKind::kValidation,
                "frame: zero_angle_ray does not pass through the RW center");
  }
}

void CochlearScene::validate() const {
  st.validate();
  sv.validate();
  modiolar_wall.validate();
  ossicles.validate();
  facial_nerve.validate();
  chorda.validate();
  frame.validate();
  if (st_centerline.points.size() != st_centerline.angle_deg.size() ||
      st_centerline.points.size() < 2) {
    throw Error(ErrorKind::kValidation,
                "scene: st_centerline needs >= 2 points with one angle each");
  }
  for (size_t i = 1; i < st_centerline.angle_deg.size(); ++i) {
    if (!(st_centerline.angle_deg[i] > st_centerline.angle_deg[i - 1])) {
      throw Error(ErrorKind::kValidation,
                  "scene: st_centerline angles must increase monotonically");
    }
  }
}

TriMesh transformed(const TriMesh& mesh, const RigidTransform& t) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

CenterlineTube transformed(const CenterlineTube& tube, const RigidTransform& t) {
  CenterlineTube out = tube;
  for (auto& p : out.centerline) p = t.apply(p);
  return out;
}

CochlearFrame transformed(const CochlearFrame& frame, const RigidTransform& t) {
  CochlearFrame out = frame;
  out.modiolar_axis = t.apply_vector(frame.modiolar_axis);
  out.apex_origin = t.apply(frame.apex_origin);
  out.rw_center = t.apply(frame.rw_center);
  out.rw_plane_normal = t.apply_vector(frame.rw_plane_normal);
  out.zero_angle_ray = t.apply_vector(frame.zero_angle_ray);
  out.stapes_center = t.apply(frame.stapes_center);
  return out;
}

CochlearScene transformed(const CochlearScene& scene, const RigidTransform& t) {
  CochlearScene out;
  out.st = transformed(scene.st, t);
  out.sv = transformed(scene.sv, t);
  out.modiolar_wall = transformed(scene.modiolar_wall, t);
  out.ossicles = transformed(scene.ossicles, t);
  out.facial_nerve = transformed(scene.facial_nerve, t);
  out.chorda = transformed(scene.chorda, t);
  out.frame = transformed(scene.frame, t);
  out.st_centerline.angle_deg = scene.st_centerline.angle_deg;
  out.st_centerline.points.reserve(scene.st_centerline.points.size());
  for (const auto& p : scene.st_centerline.points) {
    out.st_centerline.points.push_back(t.apply(p));
  }
  return out;
}

}  // namespace ciplan::geometry
