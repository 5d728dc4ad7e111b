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

#include "ciplan/geometry/queries.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "ciplan/error.hpp"
#include "ciplan/geometry/mesh_index.hpp"

namespace ciplan::geometry {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double wrap_signed(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg > 180.0) deg -= 360.0;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

// Any unit vector perpendicular to n.
Vec3 any_perpendicular(const Vec3& n) {
  const Vec3 trial = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (trial - trial.dot(n) * n).normalized();
}

struct SpiralResidual {
  Eigen::VectorXd residuals;
  double sum_sq = 0.0;
  double delta_h = 0.0;  // h_last - h_first
  double delta_theta = 0.0;
};

// Cylindrical residuals of the centerline about the axis (point, dir), with
// height and log-radius each fitted linearly in unwrapped angle.
SpiralResidual spiral_residual(std::span<const Vec3> pts, const Vec3& point,
                               const Vec3& dir) {
  const Vec3 u1 = any_perpendicular(dir);
  const Vec3 u2 = dir.cross(u1);
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::VectorXd theta(n), h(n), r(n);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 v = pts[i] - point;
    h[i] = v.dot(dir);
    const double x = v.dot(u1);
    const double y = v.dot(u2);
    r[i] = std::max(std::hypot(x, y), 1e-12);
    const double raw = std::atan2(y, x);
    theta[i] = i == 0 ? raw
                      : theta[i - 1] +
                            std::remainder(raw - prev, 2.0 * std::numbers::pi);
    prev = raw;
  }
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = theta;
  const Eigen::VectorXd log_r = r.array().log().matrix();
  const auto qr = design.colPivHouseholderQr();
  const Eigen::Vector2d ch = qr.solve(h);
  const Eigen::Vector2d cr = qr.solve(log_r);
  SpiralResidual out;
  out.residuals.resize(2 * n);
  out.residuals.head(n) = h - design * ch;
  out.residuals.tail(n) = r.cwiseProduct(log_r - design * cr);
  out.sum_sq = out.residuals.squaredNorm();
  out.delta_h = h[n - 1] - h[0];
  out.delta_theta = theta[n - 1] - theta[0];
  return out;
}

struct AxisParams {
  Vec3 base_dir;
  Vec3 base_point;
  Vec3 e1;
  Vec3 e2;

  // params: (tilt1, tilt2, shift1, shift2)
  std::pair<Vec3, Vec3> decode(const Eigen::Vector4d& p) const {
    const Vec3 dir = (base_dir + p[0] * e1 + p[1] * e2).normalized();
    const Vec3 point = base_point + p[2] * e1 + p[3] * e2;
    return {point, dir};
  }
};

Eigen::VectorXd residuals_at(std::span<const Vec3> pts, const AxisParams& ap,
                             const Eigen::Vector4d& p) {
  const auto [point, dir] = ap.decode(p);
  return spiral_residual(pts, point, dir).residuals;
}

// Levenberg-Marquardt with a central-difference Jacobian.
Eigen::Vector4d minimize_axis(std::span<const Vec3> pts, const AxisParams& ap) {
  Eigen::Vector4d p = Eigen::Vector4d::Zero();
  Eigen::VectorXd res = residuals_at(pts, ap, p);
  double f = res.squaredNorm();
  double lambda = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd jac(res.size(), 4);
    for (int k = 0; k < 4; ++k) {
      constexpr double kStep = 1e-7;
      Eigen::Vector4d hi = p;
      Eigen::Vector4d lo = p;
      hi[k] += kStep;
      lo[k] -= kStep;
      jac.col(k) = (residuals_at(pts, ap, hi) - residuals_at(pts, ap, lo)) /
                   (2.0 * kStep);
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jtr = jac.transpose() * res;
    bool improved = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::Matrix4d damped = jtj;
      damped.diagonal() += lambda * (jtj.diagonal() +
                                     Eigen::Vector4d::Constant(1e-12));
      const Eigen::Vector4d step = damped.ldlt().solve(-jtr);
      const Eigen::Vector4d trial = p + step;
      const Eigen::VectorXd trial_res = residuals_at(pts, ap, trial);
      const double ft = trial_res.squaredNorm();
      if (std::isfinite(ft) && ft <= f) {
        const double rel = (f - ft) / std::max(f, 1e-300);
        p = trial;
        res = trial_res;
        f = ft;
        lambda = std::max(lambda * 0.2, 1e-15);
        improved = true;
        if (rel < 1e-15 || step.norm() < 1e-14) return p;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return p;
}

double objective(std::span<const Vec3> pts, const AxisParams& ap,
                 const Eigen::Vector4d& p) {
  return residuals_at(pts, ap, p).squaredNorm();
}

}  // namespace

double angular_coordinate(const CochlearFrame& frame, const Vec3& point) {
  const Vec3& n = frame.modiolar_axis;
  Vec3 w = point - frame.apex_origin;
  w -= w.dot(n) * n;
  if (w.norm() < 1e-9) {
    throw Error(ErrorKind::kDegeneratePoint,
                "point lies on the modiolar axis; angle undefined");
  }
  const Vec3& x_axis = frame.zero_angle_ray;
  const Vec3 y_axis = n.cross(x_axis);
  double deg = std::atan2(w.dot(y_axis), w.dot(x_axis)) * kRadToDeg *
               static_cast<double>(frame.winding);
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

std::vector<double> unwind_angle(const CochlearFrame& frame,
                                 std::span<const Vec3> path) {
  if (path.size() < 2) {
    throw Error(ErrorKind::kParameter, "unwind_angle needs at least 2 points");
  }
  std::vector<double> out;
  out.reserve(path.size());
  double prev_raw = angular_coordinate(frame, path[0]);
  out.push_back(wrap_signed(prev_raw));
  for (size_t i = 1; i < path.size(); ++i) {
    const double raw = angular_coordinate(frame, path[i]);
    const double step = wrap_signed(raw - prev_raw);
    if (std::abs(step) >= 180.0 - 1e-9) {
      throw Error(ErrorKind::kUndersampledPath,
                  "adjacent path samples are 180 degrees or more apart");
    }
    out.push_back(out.back() + step);
    prev_raw = raw;
  }
  return out;
}

double distance_to_tube(const CenterlineTube& tube, const Segment& segment) {
  if ((segment.b - segment.a).norm() <= 0.0) {
    throw Error(ErrorKind::kParameter, "degenerate query segment");
  }
  double best = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j + 1 < tube.centerline.size(); ++j) {
    const SegmentPair pair = closest_segment_segment(
        segment, {tube.centerline[j], tube.centerline[j + 1]});
    const double radius =
        tube.radius[j] + pair.t * (tube.radius[j + 1] - tube.radius[j]);
    best = std::min(best, pair.distance - radius);
  }
  return std::max(best, 0.0);
}

Vec3 fit_line_through(const Vec3& anchor, std::span<const Vec3> points,
                      const Vec3& hint) {
  Mat3 moment = Mat3::Zero();
  for (const Vec3& q : points) {
    const Vec3 d = q - anchor;
    moment += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(moment);
  Vec3 dir = eig.eigenvectors().col(2).normalized();
  if (dir.dot(hint) < 0.0) dir = -dir;
  return dir;
}

AxisFit fit_modiolar_axis(std::span<const Vec3> centerline) {
  if (centerline.size() < 8) {
    throw Error(ErrorKind::kParameter,
                "axis fit needs at least 8 centerline samples");
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : centerline) centroid += p;
  centroid /= static_cast<double>(centerline.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : centerline) {
    cov += (p - centroid) * (p - centroid).transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 normal = eig.eigenvectors().col(0).normalized();
  const Vec3 e1 = any_perpendicular(normal);
  const Vec3 e2 = normal.cross(e1);

  // Algebraic (Kasa) circle fit of the projected points as a second seed for
  // the axis position.
  Eigen::MatrixXd a(centerline.size(), 3);
  Eigen::VectorXd b(centerline.size());
  for (size_t i = 0; i < centerline.size(); ++i) {
    const Vec3 d = centerline[i] - centroid;
    const double x = d.dot(e1);
    const double y = d.dot(e2);
    a(i, 0) = x;
    a(i, 1) = y;
    a(i, 2) = 1.0;
    b[i] = x * x + y * y;
  }
  const Eigen::Vector3d circ = a.colPivHouseholderQr().solve(b);
  const Vec3 circle_center = centroid + 0.5 * circ[0] * e1 + 0.5 * circ[1] * e2;

  AxisFit best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Vec3& seed : {centroid, circle_center}) {
    const AxisParams ap{normal, seed, e1, e2};
    const Eigen::Vector4d p = minimize_axis(centerline, ap);
    const double cost = objective(centerline, ap, p);
    if (cost < best_cost) {
      best_cost = cost;
      const auto [point, dir] = ap.decode(p);
      best.point = point;
      best.direction = dir;
    }
  }
  SpiralResidual res = spiral_residual(centerline, best.point, best.direction);
  // Orient base -> apex (height grows along the path); for a flat spiral
  // pick the orientation with positive winding.
  if (res.delta_h < -1e-9 ||
      (std::abs(res.delta_h) <= 1e-9 && res.delta_theta < 0.0)) {
    best.direction = -best.direction;
    res = spiral_residual(centerline, best.point, best.direction);
  }
  best.winding = res.delta_theta >= 0.0 ? 1 : -1;
  best.rms_residual =
      std::sqrt(res.sum_sq / static_cast<double>(centerline.size()));
  return best;
}

CochlearFrame fit_cochlear_frame(std::span<const Vec3> st_centerline,
                                 const Vec3& rw_center,
                                 const Vec3& rw_plane_normal,
                                 const Vec3& stapes_center) {
  const AxisFit axis = fit_modiolar_axis(st_centerline);
  CochlearFrame frame;
  frame.modiolar_axis = axis.direction;
  const Vec3 tip = st_centerline.back();
  frame.apex_origin =
      axis.point + (tip - axis.point).dot(axis.direction) * axis.direction;
  frame.rw_center = rw_center;
  frame.rw_plane_normal = rw_plane_normal.normalized();
  Vec3 radial = rw_center - frame.apex_origin;
  radial -= radial.dot(axis.direction) * axis.direction;
  if (radial.norm() < 1e-9) {
    throw Error(ErrorKind::kDegeneratePoint,
                "RW center lies on the fitted modiolar axis");
  }
  frame.zero_angle_ray = radial.normalized();
  frame.stapes_center = stapes_center;
  frame.winding = axis.winding;
  return frame;
}

}  // namespace ciplan::geometry
