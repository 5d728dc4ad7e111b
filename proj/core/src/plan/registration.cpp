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

#include "ciplan/plan/registration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "ciplan/error.hpp"
#include "ciplan/random.hpp"

namespace ciplan::plan {
namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct Linearization {
  double cost = 0.0;
  double sum_distance = 0.0;
  bool feasible = true;
  Mat6 jtj = Mat6::Zero();
  Vec6 jtr = Vec6::Zero();
};

class Problem {
 public:
  Problem(const geometry::SceneIndex& index, const std::vector<Vec3>& contacts,
          double weight, double margin, double standoff)
      : index_(index),
        contacts_(contacts),
        weight_(weight),
        margin_(margin),
        standoff_(standoff) {}

  void set_weight(double w) { weight_ = w; }

  Linearization evaluate(const RigidTransform& t, const Vec3& pivot,
                         bool with_jacobian) const {
    Linearization out;
    const double root_w = std::sqrt(weight_);
    for (const Vec3& local : contacts_) {
      const Vec3 p = t.apply(local);
      const auto wall = index_.wall().closest(p);
      const bool inside = index_.st().contains(p);
      // Signed wall distance, negative inside the ST; `out_dir` is its
      // gradient.
      Vec3 dir = wall.distance > 1e-12 ? Vec3((p - wall.point) / wall.distance)
                                       : wall.face_normal;
      if (inside && wall.distance > 1e-12) dir = -dir;
      const double signed_d = inside ? -wall.distance : wall.distance;
      add(out, signed_d + standoff_, dir, p, pivot, with_jacobian);
      out.sum_distance += wall.distance;
      if (!inside) {
        out.feasible = false;
        const auto st = index_.st().closest(p);
        const Vec3 outward = st.distance > 1e-12
                                 ? Vec3((p - st.point) / st.distance)
                                 : st.face_normal;
        add(out, root_w * (st.distance + margin_), root_w * outward, p, pivot,
            with_jacobian);
      }
    }
    return out;
  }

 private:
  static void add(Linearization& lin, double residual, const Vec3& grad,
                  const Vec3& p, const Vec3& pivot, bool with_jacobian) {
    lin.cost += residual * residual;
    if (!with_jacobian) return;
    Vec6 row;
    row.head<3>() = (p - pivot).cross(grad);
    row.tail<3>() = grad;
    lin.jtj += row * row.transpose();
    lin.jtr += row * residual;
  }

  const geometry::SceneIndex& index_;
  const std::vector<Vec3>& contacts_;
  double weight_;
  double margin_;
  double standoff_;
};

// Left-multiplied increment: rotation about `pivot`, then translation.
RigidTransform apply_increment(const RigidTransform& t, const Vec6& delta,
                               const Vec3& pivot) {
  const Vec3 omega = delta.head<3>();
  const double angle = omega.norm();
  RigidTransform step;
  if (angle > 0.0) {
    step.rotation = Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
  }
  step.translation = pivot - step.rotation * pivot + delta.tail<3>();
  return step.compose(t);
}

struct StartResult {
  RigidTransform transform;
  double cost = std::numeric_limits<double>::infinity();
  double mean_distance = 0.0;
  bool feasible = false;
  int iterations = 0;
  std::vector<double> trace;
};

StartResult refine(const geometry::SceneIndex& index,
                   const std::vector<Vec3>& contacts,
                   const RegistrationOptions& opt, RigidTransform t) {
  StartResult res;
  Problem problem(index, contacts, opt.penalty_weight, opt.penalty_margin,
                  opt.wall_standoff);
  Vec3 local_centroid = Vec3::Zero();
  for (const Vec3& c : contacts) local_centroid += c;
  local_centroid /= static_cast<double>(contacts.size());

  double weight = opt.penalty_weight;
  for (int round = 0; round < 5; ++round) {
    problem.set_weight(weight);
    Linearization lin = problem.evaluate(t, t.apply(local_centroid), true);
    double lambda = 1e-4;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
      ++res.iterations;
      const Vec3 pivot = t.apply(local_centroid);
      bool accepted = false;
      double rel = 0.0;
      for (int attempt = 0; attempt < 25; ++attempt) {
        // Damping from the traces of the rotation and translation blocks
        // keeps the step independent of the world axes.
        Mat6 damped = lin.jtj;
        const double rot = lin.jtj.diagonal().head<3>().mean() + 1e-12;
        const double tra = lin.jtj.diagonal().tail<3>().mean() + 1e-12;
        damped.diagonal().head<3>().array() += lambda * rot;
        damped.diagonal().tail<3>().array() += lambda * tra;
        const Vec6 delta = damped.ldlt().solve(-lin.jtr);
        if (!delta.allFinite()) break;
        const RigidTransform trial = apply_increment(t, delta, pivot);
        Linearization next =
            problem.evaluate(trial, trial.apply(local_centroid), true);
        if (next.cost <= lin.cost) {
          rel = (lin.cost - next.cost) / std::max(lin.cost, 1e-300);
          t = trial;
          lin = next;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!accepted) break;
      res.trace.push_back(lin.cost);
      if (rel < opt.relative_tolerance || lin.cost < 1e-24) break;
    }
    const Linearization final_lin =
        problem.evaluate(t, t.apply(local_centroid), false);
    res.transform = t;
    res.feasible = final_lin.feasible;
    res.cost = final_lin.cost;
    res.mean_distance =
        final_lin.sum_distance / static_cast<double>(contacts.size());
    if (res.feasible) break;
    weight *= 10.0;
  }
  return res;
}

// Wall curve: modiolar-wall points facing the ST centerline samples,
// parameterized by arc length, with the centerline angle at each sample.
struct WallCurve {
  std::vector<Vec3> points;
  std::vector<double> arc;
  std::vector<double> angle;

  Vec3 at(double s) const {
    if (s <= arc.front()) return points.front();
    if (s >= arc.back()) return points.back();
    const auto it = std::upper_bound(arc.begin(), arc.end(), s);
    const size_t j = static_cast<size_t>(it - arc.begin());
    const double f = (s - arc[j - 1]) / std::max(arc[j] - arc[j - 1], 1e-300);
    return points[j - 1] + f * (points[j] - points[j - 1]);
  }
  double arc_at_angle(double deg) const {
    if (deg <= angle.front()) return arc.front();
    if (deg >= angle.back()) return arc.back();
    const auto it = std::upper_bound(angle.begin(), angle.end(), deg);
    const size_t j = static_cast<size_t>(it - angle.begin());
    const double f = (deg - angle[j - 1]) / (angle[j] - angle[j - 1]);
    return arc[j - 1] + f * (arc[j] - arc[j - 1]);
  }
};

WallCurve wall_curve(const geometry::SceneIndex& index) {
  const auto& cl = index.scene().st_centerline;
  WallCurve curve;
  const auto& frame = index.scene().frame;
  for (size_t i = 0; i < cl.points.size(); ++i) {
    // Every wall point is roughly equidistant from the duct center, so cast
    // towards the modiolar axis and take the first wall hit.
    const Vec3& c = cl.points[i];
    const Vec3 foot = frame.apex_origin +
                      (c - frame.apex_origin).dot(frame.modiolar_axis) *
                          frame.modiolar_axis;
    const auto hit = index.wall().first_hit(c, foot - c);
    const Vec3 q = hit ? Vec3(c + *hit * (foot - c).normalized())
                       : index.wall().closest(c).point;
    curve.arc.push_back(curve.points.empty()
                            ? 0.0
                            : curve.arc.back() + (q - curve.points.back()).norm());
    curve.points.push_back(q);
    curve.angle.push_back(cl.angle_deg[i]);
  }
  return curve;
}

RigidTransform kabsch(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  Eigen::Matrix3Xd a(3, static_cast<Eigen::Index>(src.size()));
  Eigen::Matrix3Xd b(3, static_cast<Eigen::Index>(dst.size()));
  for (size_t i = 0; i < src.size(); ++i) {
    a.col(static_cast<Eigen::Index>(i)) = src[i];
    b.col(static_cast<Eigen::Index>(i)) = dst[i];
  }
  const Eigen::Matrix4d m = Eigen::umeyama(a, b, false);
  RigidTransform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

bool better(const StartResult& a, const StartResult& b) {
  const double scale = std::max({1.0, std::abs(a.cost), std::abs(b.cost)});
  if (std::abs(a.cost - b.cost) > 1e-12 * scale) return a.cost < b.cost;
  const Vec3& ta = a.transform.translation;
  const Vec3& tb = b.transform.translation;
  return std::lexicographical_compare(ta.data(), ta.data() + 3, tb.data(),
                                      tb.data() + 3);
}

}  // namespace

RegistrationReport register_array(const geometry::SceneIndex& index,
                                  const array::RestingShape& shape,
                                  const RegistrationOptions& options) {
  if (shape.contact_centers.size() < 3) {
    throw Error(ErrorKind::kParameter, "registration needs at least 3 contacts");
  }
  // Contacts base-first with chord arc length from the basal contact.
  std::vector<Vec3> base_first(shape.contact_centers.rbegin(),
                               shape.contact_centers.rend());
  std::vector<double> arc{0.0};
  for (size_t i = 1; i < base_first.size(); ++i) {
    arc.push_back(arc.back() + (base_first[i] - base_first[i - 1]).norm());
  }
  const WallCurve curve = wall_curve(index);

  std::vector<RigidTransform> starts;
  for (double angle : options.start_angles_deg) {
    const double s0 = curve.arc_at_angle(angle);
    std::vector<Vec3> targets;
    for (double a : arc) targets.push_back(curve.at(s0 + a));
    starts.push_back(kabsch(base_first, targets));
  }
  if (starts.empty()) {
    throw Error(ErrorKind::kParameter, "registration needs a start angle");
  }
  std::mt19937_64 rng(options.seed);
  const size_t deterministic = starts.size();
  const Vec3 basal = base_first.front();
  for (int r = 0; r < options.random_starts; ++r) {
    const RigidTransform& seed_pose = starts[static_cast<size_t>(r) % deterministic];
    const Vec3 axis(uniform_symmetric(rng), uniform_symmetric(rng),
                    uniform_symmetric(rng));
    const double angle = 10.0 * std::numbers::pi / 180.0 * uniform_symmetric(rng);
    const Vec3 shift(0.3 * uniform_symmetric(rng), 0.3 * uniform_symmetric(rng),
                     0.3 * uniform_symmetric(rng));
    // Perturbation about the basal contact in array-local coordinates, so the
    // start set moves with the scene.
    RigidTransform local = RigidTransform::from_axis_angle(
        axis.norm() > 1e-12 ? axis : Vec3::UnitZ(), angle);
    local.translation = basal - local.rotation * basal + shift;
    starts.push_back(seed_pose.compose(local));
  }

  std::vector<std::future<StartResult>> jobs;
  jobs.reserve(starts.size());
  for (const RigidTransform& start : starts) {
    jobs.push_back(std::async(std::launch::async, [&, start] {
      return refine(index, shape.contact_centers, options, start);
    }));
  }
  RegistrationReport report;
  report.starts_tried = static_cast<int>(starts.size());
  std::optional<StartResult> best;
  for (size_t i = 0; i < jobs.size(); ++i) {
    StartResult r = jobs[i].get();
    if (!r.feasible) continue;
    ++report.feasible_starts;
    if (!best || better(r, *best)) {
      best = std::move(r);
      report.start_index = static_cast<int>(i);
    }
  }
  if (!best) {
    throw Error(ErrorKind::kInfeasibleRegistration,
                "no registration start kept every contact inside the ST");
  }
  report.transform = best->transform;
  report.cost = best->cost;
  report.predicted_mmd = best->mean_distance;
  report.iterations = best->iterations;
  report.trace = std::move(best->trace);
  return report;
}

}  // namespace ciplan::plan
