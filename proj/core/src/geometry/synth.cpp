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

#include "ciplan/geometry/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ciplan/error.hpp"
#include "ciplan/geometry/queries.hpp"
#include "ciplan/random.hpp"

namespace ciplan::geometry {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kBasalSpanDeg = 60.0;
constexpr double kSvScale = 0.9;    // SV radius relative to ST
constexpr double kSvGap = 0.1;      // wall gap relative to ST radius
constexpr double kFacialRadius = 0.7;
constexpr double kChordaRadius = 0.2;
constexpr double kNerveDepth = 2.0;       // mm behind the RW along the corridor
constexpr double kNerveHalfLength = 4.0;

Vec3 perpendicular_part(const Vec3& v, const Vec3& n) {
  return (v - v.dot(n) * n).normalized();
}

void fix_orientation(TriMesh& mesh) {
  double volume = 0.0;
  for (const auto& t : mesh.triangles) {
    volume += mesh.vertices[t[0]].dot(
        mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  }
  if (volume < 0.0) {
    for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
  }
}

// Ellipsoid surface with semi-axes along the given orthonormal directions.
TriMesh ellipsoid(const Vec3& center, const Mat3& axes, const Vec3& radii,
                  const char* label) {
  constexpr int kLat = 12;
  constexpr int kLon = 16;
  TriMesh mesh;
  mesh.label = label;
  auto point = [&](double polar, double azimuth) {
    const Vec3 unit(std::sin(polar) * std::cos(azimuth),
                    std::sin(polar) * std::sin(azimuth), std::cos(polar));
    return Vec3(center + axes * radii.cwiseProduct(unit));
  };
  mesh.vertices.push_back(point(0.0, 0.0));
  for (int i = 1; i < kLat; ++i) {
    for (int j = 0; j < kLon; ++j) {
      mesh.vertices.push_back(point(std::numbers::pi * i / kLat,
                                    2.0 * std::numbers::pi * j / kLon));
    }
  }
  mesh.vertices.push_back(point(std::numbers::pi, 0.0));
  const int south = static_cast<int>(mesh.vertices.size()) - 1;
  auto ring = [](int i, int j) { return 1 + (i - 1) * kLon + (j % kLon); };
  for (int j = 0; j < kLon; ++j) {
    mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    mesh.triangles.push_back({south, ring(kLat - 1, j + 1), ring(kLat - 1, j)});
  }
  for (int i = 1; i + 1 < kLat; ++i) {
    for (int j = 0; j < kLon; ++j) {
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  fix_orientation(mesh);
  return mesh;
}

}  // namespace

void SpiralParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kParameter, "spiral params: " + what);
  };
  if (!(turns_deg >= 540.0)) fail("turns must be at least 540 degrees");
  if (!(basal_radius > 0.0)) fail("basal_radius must be positive");
  if (!(rise > 0.0)) fail("rise must be positive");
  if (!(duct_radius > 0.0)) fail("duct_radius must be positive");
  if (!(facial_recess_width > 0.0)) fail("facial_recess_width must be positive");
  if (!(taper > 0.0 && taper <= 1.0)) fail("taper must lie in (0, 1]");
  // Adjacent turns must not overlap: the radial gap between turns has to
  // exceed the sum of their duct radii (with margin for the perturbation).
  const double shrink = std::exp(-taper * 0.95);
  const double limit = 0.9 * (1.0 - shrink) / (1.0 + shrink);
  if (duct_radius / basal_radius > limit) {
    fail("duct_radius too large for the turn spacing implied by taper");
  }
}

SyntheticCochlea::SyntheticCochlea(const SpiralParams& params)
    : params_(params) {
  params_.validate();
  std::mt19937_64 rng(params_.seed);
  base_radius_ = params_.basal_radius * (1.0 + 0.02 * uniform_symmetric(rng));
  taper_ = params_.taper * (1.0 + 0.03 * uniform_symmetric(rng));
  rise_ = params_.rise * (1.0 + 0.05 * uniform_symmetric(rng));
  wobble_amp_ = 0.004 * (1.0 + 0.5 * uniform_symmetric(rng));
  wobble_phase1_ = std::numbers::pi * uniform_symmetric(rng);
  wobble_phase2_ = std::numbers::pi * uniform_symmetric(rng);

  for (double a = -kHookDeg; a < params_.turns_deg - 1e-9; a += kRingStepDeg) {
    ring_angles_.push_back(a);
  }
  ring_angles_.push_back(params_.turns_deg);

  // Everything below is built in raw (right-ear) coordinates and mirrored at
  // the end for the left ear.
  std::vector<Vec3> centers, inwards, sv_centers;
  std::vector<double> radii, sv_radii;
  const Vec3 up = Vec3::UnitZ();
  for (double a : ring_angles_) {
    const double rho = st_radius(a);
    const Vec3 c = raw_center(a);
    const Vec3 in = mirror(inward(a));
    centers.push_back(c);
    inwards.push_back(in);
    radii.push_back(rho);
    sv_centers.push_back(c + (rho * (1.0 + kSvScale + kSvGap)) * up);
    sv_radii.push_back(kSvScale * rho);
  }
  scene_.st = tube_mesh(centers, inwards, radii, "st");
  scene_.sv = tube_mesh(sv_centers, inwards, sv_radii, "sv");

  // Modiolar wall: the inward-facing band of the ST rings, sharing vertices.
  {
    TriMesh& wall = scene_.modiolar_wall;
    wall.label = "modiolar_wall";
    constexpr int kCols = 2 * kWallHalfSegments + 1;
    for (size_t j = 0; j < ring_angles_.size(); ++j) {
      for (int k = -kWallHalfSegments; k <= kWallHalfSegments; ++k) {
        const int idx = (k + kRingSegments) % kRingSegments;
        wall.vertices.push_back(
            scene_.st.vertices[j * kRingSegments + static_cast<size_t>(idx)]);
      }
    }
    for (int j = 0; j + 1 < static_cast<int>(ring_angles_.size()); ++j) {
      for (int k = 0; k + 1 < kCols; ++k) {
        const int a = j * kCols + k;
        const int b = (j + 1) * kCols + k;
        wall.triangles.push_back({a, b, b + 1});
        wall.triangles.push_back({a, b + 1, a + 1});
      }
    }
  }

  // Centerline samples from the RW (0 degrees) to the apex.
  std::vector<Vec3> cl;
  for (size_t j = 0; j < ring_angles_.size(); ++j) {
    if (ring_angles_[j] >= -1e-9) cl.push_back(centers[j]);
  }

  // RW disc center on the lateral ST wall at 0 degrees, the membrane facing
  // back and out so the basal corridor crosses it 35 degrees off the plane.
  const Vec3 t0 = [&] {
    const double h = 1e-3;
    return Vec3((raw_center(h) - raw_center(-h)).normalized());
  }();
  const Vec3 out = Vec3::UnitX();
  const Vec3 rw_center = raw_center(0.0) + st_radius(0.0) * out;
  std::vector<Vec3> basal;
  for (size_t j = 0; j < ring_angles_.size(); ++j) {
    if (ring_angles_[j] >= -1e-9 && ring_angles_[j] <= kBasalSpanDeg + 1e-9) {
      basal.push_back(centers[j]);
    }
  }
  const Vec3 v0 = fit_line_through(rw_center, basal, t0);
  const double tilt = 35.0 * kDegToRad;
  const Vec3 rw_normal =
      (std::cos(tilt) * perpendicular_part(out, v0) - std::sin(tilt) * v0)
          .normalized();
  const Vec3 lift = perpendicular_part(up, v0);
  // Lateral direction of the recess: the way the extended entries move.
  Vec3 ext = raw_center(0.0) - rw_center;
  ext -= ext.dot(rw_normal) * rw_normal;
  const Vec3 lateral = perpendicular_part(ext.normalized(), v0);

  const double half = 0.5 * params_.facial_recess_width;
  // Both nerves cross the corridor's line of sight kNerveDepth behind the
  // RW, running along `lift` on either side of the recess.
  auto nerve = [&](double offset, double radius, const char* label) {
    CenterlineTube tube;
    tube.label = label;
    constexpr int kSamples = 17;
    for (int i = 0; i < kSamples; ++i) {
      const double u = -kNerveHalfLength +
                       2.0 * kNerveHalfLength * i / (kSamples - 1);
      tube.centerline.push_back(rw_center - kNerveDepth * v0 +
                                offset * lateral + u * lift);
      tube.radius.push_back(radius);
    }
    return tube;
  };
  scene_.facial_nerve = nerve(half + kFacialRadius, kFacialRadius,
                              "facial_nerve");
  scene_.chorda = nerve(-(half + kChordaRadius), kChordaRadius, "chorda");

  Mat3 axes;
  axes.col(0) = v0;
  axes.col(1) = lift;
  axes.col(2) = v0.cross(lift);
  scene_.ossicles = ellipsoid(rw_center - 5.0 * v0 + 4.0 * lift, axes,
                              Vec3(1.2, 0.8, 0.8), "ossicles");
  const Vec3 stapes = rw_center + 2.5 * lift - 0.5 * v0;
  corridor_dir_ = v0;

  if (params_.left_ear) {
    auto flip_mesh = [this](TriMesh& mesh) {
      for (auto& v : mesh.vertices) v = mirror(v);
      for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
    };
    flip_mesh(scene_.st);
    flip_mesh(scene_.sv);
    flip_mesh(scene_.modiolar_wall);
    flip_mesh(scene_.ossicles);
    for (auto& p : scene_.facial_nerve.centerline) p = mirror(p);
    for (auto& p : scene_.chorda.centerline) p = mirror(p);
    for (auto& p : cl) p = mirror(p);
    corridor_dir_ = mirror(v0);
  }
  const Vec3 rw_w = mirror(rw_center);
  scene_.frame = fit_cochlear_frame(cl, rw_w, mirror(rw_normal), mirror(stapes));
  scene_.st_centerline.points = cl;
  scene_.st_centerline.angle_deg = unwind_angle(scene_.frame, cl);
  scene_.validate();
}

double SyntheticCochlea::radius_scale(double theta_deg) const {
  const double turns = theta_deg / 360.0;
  const double wobble =
      1.0 + wobble_amp_ * (std::sin(2.0 * std::numbers::pi * 1.5 * turns +
                                    wobble_phase1_) +
                           std::sin(2.0 * std::numbers::pi * 2.5 * turns +
                                    wobble_phase2_));
  return std::exp(-taper_ * turns) * wobble;
}

Vec3 SyntheticCochlea::raw_center(double theta_deg) const {
  const double r = base_radius_ * radius_scale(theta_deg);
  const double a = theta_deg * kDegToRad;
  return {r * std::cos(a), r * std::sin(a), rise_ * theta_deg / 360.0};
}

Vec3 SyntheticCochlea::mirror(const Vec3& p) const {
  return params_.left_ear ? Vec3(p.x(), -p.y(), p.z()) : p;
}

Vec3 SyntheticCochlea::st_center(double theta_deg) const {
  return mirror(raw_center(theta_deg));
}

double SyntheticCochlea::st_radius(double theta_deg) const {
  return params_.duct_radius * radius_scale(theta_deg);
}

Vec3 SyntheticCochlea::tangent(double theta_deg) const {
  const double h = 1e-3;
  return mirror(
      (raw_center(theta_deg + h) - raw_center(theta_deg - h)).normalized());
}

Vec3 SyntheticCochlea::inward(double theta_deg) const {
  const double a = theta_deg * kDegToRad;
  const Vec3 radial_in(-std::cos(a), -std::sin(a), 0.0);
  return mirror(perpendicular_part(radial_in, mirror(tangent(theta_deg))));
}

Vec3 SyntheticCochlea::axis() const { return Vec3::UnitZ(); }

std::vector<Vec3> SyntheticCochlea::wall_polyline() const {
  std::vector<Vec3> out;
  out.reserve(ring_angles_.size());
  for (size_t j = 0; j < ring_angles_.size(); ++j) {
    out.push_back(scene_.st.vertices[j * kRingSegments]);
  }
  return out;
}

TriMesh SyntheticCochlea::tube_mesh(const std::vector<Vec3>& centers,
                                    const std::vector<Vec3>& inward,
                                    const std::vector<double>& radii,
                                    const char* label) const {
  TriMesh mesh;
  mesh.label = label;
  const int rings = static_cast<int>(centers.size());
  for (int j = 0; j < rings; ++j) {
    const Vec3 t =
        (centers[std::min(j + 1, rings - 1)] - centers[std::max(j - 1, 0)])
            .normalized();
    const Vec3 b1 = perpendicular_part(inward[j], t);
    const Vec3 b2 = t.cross(b1);
    for (int k = 0; k < kRingSegments; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / kRingSegments;
      mesh.vertices.push_back(centers[j] +
                              radii[j] * (std::cos(phi) * b1 + std::sin(phi) * b2));
    }
  }
  const int start_cap = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(centers.front());
  const int end_cap = start_cap + 1;
  mesh.vertices.push_back(centers.back());
  auto v = [](int j, int k) { return j * kRingSegments + (k % kRingSegments); };
  for (int j = 0; j + 1 < rings; ++j) {
    for (int k = 0; k < kRingSegments; ++k) {
      mesh.triangles.push_back({v(j, k), v(j + 1, k), v(j + 1, k + 1)});
      mesh.triangles.push_back({v(j, k), v(j + 1, k + 1), v(j, k + 1)});
    }
  }
  for (int k = 0; k < kRingSegments; ++k) {
    mesh.triangles.push_back({start_cap, v(0, k), v(0, k + 1)});
    mesh.triangles.push_back({end_cap, v(rings - 1, k + 1), v(rings - 1, k)});
  }
  fix_orientation(mesh);
  return mesh;
}

CochlearScene synth_cochlea(const SpiralParams& params) {
  return SyntheticCochlea(params).scene();
}

}  // namespace ciplan::geometry
