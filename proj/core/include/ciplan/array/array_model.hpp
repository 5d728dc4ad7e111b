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
#include <vector>

#include "ciplan/geometry/types.hpp"

namespace ciplan::array {

using geometry::RigidTransform;
using geometry::Vec3;

struct ArraySpec {
  int contact_count = 22;
  double active_length = 15.0;  // arc length first -> last contact, mm
  double design_curl = 450.0;   // degrees
  // Arc-length offsets of the three base markers proximal to the most basal
  // contact, mm: distal, middle, proximal.
  std::array<double, 3> marker_offsets{0.5, 1.0, 1.5};
  double tip_taper = 0.5;  // log decay of the curvature radius per turn

  void validate() const;
};

inline constexpr int kApicalContacts = 11;

// Resting (unconstrained) shape in array-local coordinates: a planar
// logarithmic spiral in z = 0 whose basal contact sits on +x, curling
// counter-clockwise seen from +z.
struct RestingShape {
  // Straight lead from the proximal marker to the basal contact, then the
  // spiral to the tip. Contact centers are polyline vertices.
  std::vector<Vec3> centerline;
  std::vector<Vec3> contact_centers;  // tip first
  std::array<Vec3, 3> marker_points;  // distal, middle, proximal
  std::vector<int> apical_index_set;
  Vec3 plane_normal = Vec3::UnitZ();

  const Vec3& middle_marker() const { return marker_points[1]; }
  const Vec3& proximal_marker() const { return marker_points[2]; }
  const Vec3& basal_contact() const { return contact_centers.back(); }
  const Vec3& tip_contact() const { return contact_centers.front(); }
};

RestingShape build_resting_shape(const ArraySpec& spec);

// Throws kValidation when the transform is not a proper rotation.
RestingShape pose_shape(const RestingShape& shape, const RigidTransform& t);

}  // namespace ciplan::array
