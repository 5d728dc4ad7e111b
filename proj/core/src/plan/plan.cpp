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

#include "ciplan/plan/plan.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "ciplan/error.hpp"
#include "ciplan/geometry/queries.hpp"
#include "ciplan/metrics/metrics.hpp"

namespace ciplan::plan {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

Vec3 project_out(const Vec3& v, const Vec3& n) { return v - v.dot(n) * n; }

// Depths are kept on a 2^-20 mm grid so adding the over-insertion and
// subtracting it back are exact in binary floating point.
double on_depth_grid(double mm) {
  return std::ldexp(std::round(std::ldexp(mm, 20)), -20);
}

}  // namespace

std::string to_string(EntryKind kind) {
  switch (kind) {
    case EntryKind::kRwCenter: return "RW_CENTER";
    case EntryKind::kSlightExtendedRw: return "SLIGHT_EXTENDED_RW";
    case EntryKind::kSubstantialExtendedRw: return "SUBSTANTIAL_EXTENDED_RW";
  }
  return "RW_CENTER";
}

EntryKind parse_entry_kind(const std::string& text) {
  if (text == "RW_CENTER" || text == "center") return EntryKind::kRwCenter;
  if (text == "SLIGHT_EXTENDED_RW" || text == "slight") {
    return EntryKind::kSlightExtendedRw;
  }
  if (text == "SUBSTANTIAL_EXTENDED_RW" || text == "substantial") {
    return EntryKind::kSubstantialExtendedRw;
  }
  throw Error(ErrorKind::kParse, "unknown entry kind '" + text + "'");
}

std::string ClockFace::str() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", hours, minutes);
  return buf;
}

ClockFace ClockFace::parse(const std::string& text) {
  int h = 0;
  int m = 0;
  char tail = 0;
  if (text.size() != 5 ||
      std::sscanf(text.c_str(), "%2d:%2d%c", &h, &m, &tail) != 2 || h < 1 ||
      h > 12 || (m != 0 && m != 30)) {
    throw Error(ErrorKind::kParse, "bad clock value '" + text + "'");
  }
  return {h, m};
}

double clock_angle_deg(const geometry::CochlearFrame& frame, const Vec3& center,
                       const Vec3& direction, const Vec3& view_axis) {
  const Vec3 view = view_axis.normalized();
  const Vec3 ref = project_out(frame.stapes_center - center, view);
  const Vec3 dir = project_out(direction, view);
  if (ref.norm() < 1e-9 || dir.norm() < 1e-9) {
    throw Error(ErrorKind::kDegenerateDirection,
                "clock direction or stapes reference is parallel to the view "
                "axis");
  }
  // Clockwise seen looking along +view is a right-handed turn about +view.
  double deg = std::atan2(view.dot(ref.cross(dir)), ref.dot(dir)) * kRadToDeg;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

ClockFace clock_encode(const geometry::CochlearFrame& frame, const Vec3& center,
                       const Vec3& direction, const Vec3& view_axis) {
  const double deg = clock_angle_deg(frame, center, direction, view_axis);
  const int half_hours = static_cast<int>(std::lround(deg / 15.0)) % 24;
  ClockFace clock;
  clock.hours = half_hours / 2 == 0 ? 12 : half_hours / 2;
  clock.minutes = (half_hours % 2) * 30;
  return clock;
}

double tilt_angle(const Vec3& plan_vector, const Vec3& rw_plane_normal) {
  const double c = std::abs(plan_vector.normalized().dot(rw_plane_normal.normalized()));
  return std::acos(std::min(c, 1.0)) * kRadToDeg;
}

Vec3 rw_plane_intersection(const geometry::CochlearFrame& frame,
                           const Vec3& point, const Vec3& vector) {
  const Vec3& n = frame.rw_plane_normal;
  const double denom = vector.dot(n);
  if (std::abs(denom) < 1e-12) {
    throw Error(ErrorKind::kNoIntersection,
                "insertion vector is parallel to the RW plane");
  }
  const double s = (frame.rw_center - point).dot(n) / denom;
  return point + s * vector;
}

double base_depth(const Vec3& marker, const Vec3& intersection,
                  const Vec3& vector) {
  return (marker - intersection).dot(vector);
}

double base_depth(const geometry::CochlearFrame& frame, const Vec3& marker,
                  const Vec3& entry, const Vec3& vector) {
  return base_depth(marker, rw_plane_intersection(frame, entry, vector), vector);
}

Vec3 extension_direction(const geometry::CochlearScene& scene) {
  const auto& frame = scene.frame;
  const Vec3 ext = project_out(scene.st_centerline.points.front() - frame.rw_center,
                               frame.rw_plane_normal);
  if (ext.norm() < 1e-9) {
    throw Error(ErrorKind::kDegenerateDirection,
                "ST centerline start projects onto the RW center");
  }
  return ext.normalized();
}

PlanSet candidate_plans(const geometry::SceneIndex& index,
                        const array::RestingShape& shape,
                        const array::ArraySpec& spec,
                        const PlanOptions& options) {
  spec.validate();
  const auto& scene = index.scene();
  const auto& frame = scene.frame;
  PlanSet out;
  out.registration = register_array(index, shape, options.registration);
  const RigidTransform& pose = out.registration.transform;
  const array::RestingShape posed = array::pose_shape(shape, pose);

  std::vector<Vec3> basal;
  const auto& cl = scene.st_centerline;
  for (size_t i = 0; i < cl.points.size(); ++i) {
    if (cl.angle_deg[i] <= options.basal_span_deg) basal.push_back(cl.points[i]);
  }
  if (basal.size() < 2) {
    throw Error(ErrorKind::kParameter, "basal ST centerline span is too short");
  }
  const Vec3 ext = extension_direction(scene);
  // Curl direction: the array's principal normal at the basal contact,
  // i.e. the way the tip curls.
  const auto& base_first = shape.contact_centers;
  const Vec3 base_tangent =
      (base_first[base_first.size() - 2] - base_first.back()).normalized();
  const Vec3 local_curl =
      project_out(shape.plane_normal.cross(base_tangent), base_tangent)
          .normalized();
  const Vec3 curl_dir = pose.apply_vector(local_curl);

  const double predicted_aid = metrics::compute_aid(scene, posed.contact_centers);

  // Entry clocks are read looking into the cochlea through the RW.
  Vec3 rw_view = frame.rw_plane_normal;
  {
    const Vec3 into = (basal.back() - frame.rw_center);
    if (rw_view.dot(into) < 0.0) rw_view = -rw_view;
  }

  for (EntryKind kind : kAllEntryKinds) {
    InsertionPlan plan;
    plan.entry.kind = kind;
    double offset = 0.0;
    if (kind == EntryKind::kSlightExtendedRw) offset = options.slight_offset_mm;
    if (kind == EntryKind::kSubstantialExtendedRw) {
      offset = options.substantial_offset_mm;
    }
    plan.entry.point = frame.rw_center + offset * ext;
    plan.vector = geometry::fit_line_through(plan.entry.point, basal,
                                             basal.back() - plan.entry.point);
    const geometry::Segment corridor{
        plan.entry.point - options.trajectory_length_mm * plan.vector,
        plan.entry.point};
    plan.clearance_fn = geometry::distance_to_tube(scene.facial_nerve, corridor);
    plan.clearance_chorda = geometry::distance_to_tube(scene.chorda, corridor);
    plan.clearance_ossicles = index.ossicles().distance(corridor);
    plan.tilt_deg = tilt_angle(plan.vector, frame.rw_plane_normal);
    plan.curl_clock = clock_encode(frame, plan.entry.point, curl_dir, plan.vector);
    if (offset > 0.0) {
      plan.entry_clock = clock_encode(frame, frame.rw_center,
                                      plan.entry.point - frame.rw_center, rw_view);
    }
    plan.base_depth = on_depth_grid(
        base_depth(frame, posed.middle_marker(), plan.entry.point, plan.vector));
    plan.overinsert_depth = plan.base_depth + kOverinsertionMm;
    plan.registered_pose = pose;
    plan.predicted_aid = predicted_aid;
    plan.predicted_mmd = out.registration.predicted_mmd;
    out.plans.push_back(plan);
  }
  return out;
}

}  // namespace ciplan::plan
