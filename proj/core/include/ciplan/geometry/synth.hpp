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
#include <vector>

#include "ciplan/geometry/types.hpp"

namespace ciplan::geometry {

// Synthetic inner-ear test bed: logarithmic-spiral scala tympani with linear
// rise, a stacked scala vestibuli, the modiolar wall as the inner-facing
// sheet of the ST, and facial nerve / chorda tubes flanking the approach.
struct SpiralParams {
  double turns_deg = 900.0;
  double basal_radius = 2.9;  // ST centerline radius at 0 degrees, mm
  double taper = 0.5;         // log radius decay per turn
  double rise = 0.1;          // mm per turn along the modiolar axis
  double duct_radius = 0.45;  // ST radius at the base; scales with radius
  // Free gap between the facial nerve and chorda surfaces around the
  // round-window approach corridor.
  double facial_recess_width = 5.0;
  bool left_ear = false;  // mirrored chirality
  std::uint64_t seed = 0;

  void validate() const;
};

class SyntheticCochlea {
 public:
  explicit SyntheticCochlea(const SpiralParams& params);

  const SpiralParams& params() const { return params_; }

  // Parametric ground truth in scene coordinates; theta in degrees.
  Vec3 st_center(double theta_deg) const;
  double st_radius(double theta_deg) const;
  Vec3 tangent(double theta_deg) const;
  // Unit cross-section direction pointing at the modiolus.
  Vec3 inward(double theta_deg) const;
  Vec3 axis() const;

  // The chain of ST mesh vertices facing the modiolus (on both the ST
  // surface and the modiolar wall), basal to apical.
  std::vector<Vec3> wall_polyline() const;
  // Ring angles used for the ST mesh (degrees).
  const std::vector<double>& ring_angles() const { return ring_angles_; }

  // Direction of the straight corridor from the round window into the
  // basal turn, and the lateral direction of the facial recess.
  Vec3 corridor_direction() const { return corridor_dir_; }

  const CochlearScene& scene() const { return scene_; }

 private:
  double radius_scale(double theta_deg) const;
  Vec3 raw_center(double theta_deg) const;
  Vec3 mirror(const Vec3& p) const;
  TriMesh tube_mesh(const std::vector<Vec3>& centers,
                    const std::vector<Vec3>& inward,
                    const std::vector<double>& radii, const char* label) const;

  SpiralParams params_;
  double base_radius_ = 0.0;
  double taper_ = 0.0;
  double rise_ = 0.0;
  double wobble_amp_ = 0.0;
  double wobble_phase1_ = 0.0;
  double wobble_phase2_ = 0.0;
  std::vector<double> ring_angles_;
  Vec3 corridor_dir_ = Vec3::UnitY();
  CochlearScene scene_;
};

inline constexpr int kRingSegments = 24;       // 15 degrees apart
inline constexpr int kWallHalfSegments = 2;    // +-30 degrees of the ring
inline constexpr double kRingStepDeg = 3.0;
inline constexpr double kHookDeg = 9.0;        // ST extends past the RW

CochlearScene synth_cochlea(const SpiralParams& params);

}  // namespace ciplan::geometry
