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
#include <optional>
#include <string>
#include <vector>

#include "ciplan/array/array_model.hpp"
#include "ciplan/geometry/scene_index.hpp"
#include "ciplan/plan/registration.hpp"

namespace ciplan::plan {

enum class EntryKind { kRwCenter, kSlightExtendedRw, kSubstantialExtendedRw };

inline constexpr std::array<EntryKind, 3> kAllEntryKinds{
    EntryKind::kRwCenter, EntryKind::kSlightExtendedRw,
    EntryKind::kSubstantialExtendedRw};

std::string to_string(EntryKind kind);  // RW_CENTER, ...
// Accepts the canonical names and the short forms center/slight/substantial.
EntryKind parse_entry_kind(const std::string& text);

struct EntrySite {
  EntryKind kind = EntryKind::kRwCenter;
  Vec3 point = Vec3::Zero();
};

struct ClockFace {
  int hours = 12;    // 1..12
  int minutes = 0;   // 0 or 30

  std::string str() const;  // "HH:MM"
  static ClockFace parse(const std::string& text);
  friend bool operator==(const ClockFace&, const ClockFace&) = default;
};

struct InsertionPlan {
  EntrySite entry;
  Vec3 vector = Vec3::UnitX();
  double clearance_fn = 0.0;
  double clearance_chorda = 0.0;
  double clearance_ossicles = 0.0;
  double tilt_deg = 0.0;
  std::optional<ClockFace> curl_clock;
  // Absent for the RW-center entry, which sits at the clock center.
  std::optional<ClockFace> entry_clock;
  double base_depth = 0.0;
  double overinsert_depth = 0.0;
  RigidTransform registered_pose;
  double predicted_aid = 0.0;
  double predicted_mmd = 0.0;
};

inline constexpr double kOverinsertionMm = 2.0;

struct PlanOptions {
  double slight_offset_mm = 0.5;
  double substantial_offset_mm = 1.0;
  double basal_span_deg = 60.0;       // centerline span fitted by the vector
  double trajectory_length_mm = 25.0; // corridor checked for clearances
  RegistrationOptions registration;
};

// Clockwise angle (seen looking along view_axis) from the stapes-footplate
// direction to `direction`, both projected onto the plane normal to
// view_axis, rounded to the nearest half hour. Throws kDegenerateDirection
// when either projection vanishes.
ClockFace clock_encode(const geometry::CochlearFrame& frame, const Vec3& center,
                       const Vec3& direction, const Vec3& view_axis);
// Unrounded clockwise angle in [0, 360).
double clock_angle_deg(const geometry::CochlearFrame& frame, const Vec3& center,
                       const Vec3& direction, const Vec3& view_axis);

// Angle between the vector and the RW-plane normal, folded into [0, 90].
double tilt_angle(const Vec3& plan_vector, const Vec3& rw_plane_normal);

// Point where the line (point, vector) meets the RW plane. Throws
// kNoIntersection when the line is parallel to the plane.
Vec3 rw_plane_intersection(const geometry::CochlearFrame& frame,
                           const Vec3& point, const Vec3& vector);

// Signed distance of the marker past the intersection along the vector.
double base_depth(const Vec3& marker, const Vec3& intersection,
                  const Vec3& vector);
double base_depth(const geometry::CochlearFrame& frame, const Vec3& marker,
                  const Vec3& entry, const Vec3& vector);

// RW-plane direction in which the extended entries are displaced: towards
// the basal ST centerline.
Vec3 extension_direction(const geometry::CochlearScene& scene);

struct PlanSet {
  RegistrationReport registration;
  std::vector<InsertionPlan> plans;  // one per EntryKind, in kAllEntryKinds order
};

PlanSet candidate_plans(const geometry::SceneIndex& index,
                        const array::RestingShape& shape,
                        const array::ArraySpec& spec,
                        const PlanOptions& options = {});

}  // namespace ciplan::plan
