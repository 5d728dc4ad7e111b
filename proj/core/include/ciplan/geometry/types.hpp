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

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ciplan::geometry {

// Millimetres for lengths, degrees for angles, throughout.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Segment {
  Vec3 a;
  Vec3 b;
};

// Proper rigid motion x -> R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_axis_angle(const Vec3& axis, double angle_rad,
                                        const Vec3& translation = Vec3::Zero());

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation * v; }

  RigidTransform inverse() const;
  // (*this) after (inner): x -> this(inner(x)).
  RigidTransform compose(const RigidTransform& inner) const;

  // Orthonormal with det = +1 within tol.
  bool is_rigid(double tol = 1e-9) const;

  // Rotation angle of the relative rotation, in degrees.
  double rotation_angle_deg() const;
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::string label;

  bool empty() const { return triangles.empty(); }

  // Indices in range and no zero-area triangles. Throws kValidation.
  void validate() const;
  // Every undirected edge shared by exactly two triangles with opposite
  // orientation.
  bool is_watertight() const;
};

struct CenterlineTube {
  std::vector<Vec3> centerline;
  std::vector<double> radius;  // per centerline vertex
  std::string label;

  void validate() const;
};

struct CochlearFrame {
  Vec3 modiolar_axis = Vec3::UnitZ();
  Vec3 apex_origin = Vec3::Zero();
  Vec3 rw_center = Vec3::UnitX();
  Vec3 rw_plane_normal = Vec3::UnitX();
  Vec3 zero_angle_ray = Vec3::UnitX();
  Vec3 stapes_center = Vec3::Zero();
  // +1 when cochlear angle grows counter-clockwise about modiolar_axis
  // (right-hand rule), -1 for the mirrored ear.
  int winding = 1;

  void validate() const;
};

// Polyline with an angular coordinate (degrees, unwrapped) per point.
struct AngularPolyline {
  std::vector<Vec3> points;
  std::vector<double> angle_deg;
};

struct CochlearScene {
  TriMesh st;
  TriMesh sv;
  TriMesh modiolar_wall;
  TriMesh ossicles;
  CenterlineTube facial_nerve;
  CenterlineTube chorda;
  CochlearFrame frame;
  AngularPolyline st_centerline;

  void validate() const;
};

TriMesh transformed(const TriMesh& mesh, const RigidTransform& t);
CenterlineTube transformed(const CenterlineTube& tube, const RigidTransform& t);
CochlearFrame transformed(const CochlearFrame& frame, const RigidTransform& t);
CochlearScene transformed(const CochlearScene& scene, const RigidTransform& t);

}  // namespace ciplan::geometry
