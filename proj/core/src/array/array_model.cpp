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

#include "ciplan/array/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ciplan/error.hpp"

namespace ciplan::array {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kSampleStepDeg = 1.0;

struct LogSpiral {
  double a;  // radius at phi = 0
  double k;  // d(log r)/d(phi)

  Vec3 point(double phi) const {
    const double r = a * std::exp(-k * phi);
    return {r * std::cos(phi), r * std::sin(phi), 0.0};
  }
  Vec3 tangent(double phi) const {
    const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
    const Vec3 around(-std::sin(phi), std::cos(phi), 0.0);
    return (around - k * radial).normalized();
  }
  // Inverse of s(phi) = a sqrt(1+k^2)/k (1 - exp(-k phi)).
  double phi_at(double s) const {
    return -std::log1p(-s * k / (a * std::sqrt(1.0 + k * k))) / k;
  }
};

}  // namespace

void ArraySpec::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kParameter, "array spec: " + what);
  };
  if (contact_count < 2) fail("contact_count must be at least 2");
  if (!(active_length > 0.0)) fail("active_length must be positive");
  if (!(design_curl > 0.0)) fail("design_curl must be positive");
  if (!(tip_taper > 0.0)) fail("tip_taper must be positive");
  if (!(marker_offsets[0] > 0.0 && marker_offsets[0] < marker_offsets[1] &&
        marker_offsets[1] < marker_offsets[2])) {
    fail("marker_offsets must be positive and strictly increasing");
  }
}

RestingShape build_resting_shape(const ArraySpec& spec) {
  spec.validate();
  const double curl = spec.design_curl * kDegToRad;
  const double k = spec.tip_taper / (2.0 * std::numbers::pi);
  const double a = spec.active_length * k /
                   (std::sqrt(1.0 + k * k) * -std::expm1(-k * curl));
  const LogSpiral spiral{a, k};

  RestingShape shape;
  const int n = spec.contact_count;
  std::vector<double> contact_phi(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = spec.active_length * i / (n - 1);
    contact_phi[static_cast<size_t>(i)] = i == n - 1 ? curl : spiral.phi_at(s);
  }
  // Dense samples merged with the contact angles so every contact center is
  // a polyline vertex.
  std::vector<double> phis = contact_phi;
  const double step = kSampleStepDeg * kDegToRad;
  for (double phi = step; phi < curl; phi += step) phis.push_back(phi);
  std::sort(phis.begin(), phis.end());
  phis.erase(std::unique(phis.begin(), phis.end(),
                         [](double x, double y) { return y - x < 1e-12; }),
             phis.end());

  const Vec3 base = spiral.point(0.0);
  const Vec3 base_dir = spiral.tangent(0.0);
  for (int m = 0; m < 3; ++m) {
    shape.marker_points[static_cast<size_t>(m)] =
        base - spec.marker_offsets[static_cast<size_t>(m)] * base_dir;
  }
  shape.centerline.push_back(shape.marker_points[2]);
  shape.centerline.push_back(shape.marker_points[1]);
  shape.centerline.push_back(shape.marker_points[0]);
  for (double phi : phis) shape.centerline.push_back(spiral.point(phi));

  for (int i = n - 1; i >= 0; --i) {
    shape.contact_centers.push_back(
        spiral.point(contact_phi[static_cast<size_t>(i)]));
  }
  const int apical = std::min(kApicalContacts, n);
  for (int i = 0; i < apical; ++i) shape.apical_index_set.push_back(i);
  return shape;
}

RestingShape pose_shape(const RestingShape& shape, const RigidTransform& t) {
  if (!t.is_rigid()) {
    throw Error(ErrorKind::kValidation,
                "pose_shape requires a proper rigid transform");
  }
  RestingShape out = shape;
  for (auto& p : out.centerline) p = t.apply(p);
  for (auto& p : out.contact_centers) p = t.apply(p);
  for (auto& p : out.marker_points) p = t.apply(p);
  out.plane_normal = t.apply_vector(shape.plane_normal);
  return out;
}

}  // namespace ciplan::array
