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

#include <span>
#include <vector>

#include "ciplan/geometry/types.hpp"

namespace ciplan::geometry {

// In-plane angle of `point` about the modiolar axis, measured from the
// zero-angle ray in the frame's winding direction. Range [0, 360).
// Throws kDegeneratePoint for points on the axis.
double angular_coordinate(const CochlearFrame& frame, const Vec3& point);

// Cumulative angles along an ordered path. The first sample is wrapped into
// (-180, 180] so a path starting just before the RW reads slightly negative;
// subsequent samples accumulate the shortest signed step. Steps of 180 degrees
// or more throw kUndersampledPath.
std::vector<double> unwind_angle(const CochlearFrame& frame,
                                 std::span<const Vec3> path);

// Clearance between a segment and a tube surface: closest centerline
// distance minus the interpolated local radius, clamped at zero.
double distance_to_tube(const CenterlineTube& tube, const Segment& segment);

// Least-squares fit of a line through `anchor` to `points`: the direction
// maximizing the second moment of (q - anchor). Sign follows `hint`.
Vec3 fit_line_through(const Vec3& anchor, std::span<const Vec3> points,
                      const Vec3& hint);

// Modiolar axis of a spiral centerline with linear rise and exponential
// radius decay, fitted by Levenberg-Marquardt on the cylindrical residuals.
struct AxisFit {
  Vec3 direction = Vec3::UnitZ();  // oriented base -> apex
  Vec3 point = Vec3::Zero();       // a point on the axis
  double rms_residual = 0.0;
  int winding = 1;
};
AxisFit fit_modiolar_axis(std::span<const Vec3> centerline);

// Builds the cochlear frame from the ST centerline, RW center and stapes
// footplate center. apex_origin is the axis point nearest the last
// centerline sample.
CochlearFrame fit_cochlear_frame(std::span<const Vec3> st_centerline,
                                 const Vec3& rw_center,
                                 const Vec3& rw_plane_normal,
                                 const Vec3& stapes_center);

}  // namespace ciplan::geometry
