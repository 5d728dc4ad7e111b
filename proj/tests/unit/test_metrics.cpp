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

#include <gtest/gtest.h>

#include <sstream>

#include "ciplan/error.hpp"
#include "ciplan/geometry/synth.hpp"
#include "ciplan/metrics/metrics.hpp"
#include "oracles.hpp"

using namespace ciplan;
using namespace ciplan::metrics;
using geometry::SceneIndex;
using geometry::SyntheticCochlea;

namespace {

const SyntheticCochlea& cochlea() {
  static const SyntheticCochlea c{geometry::SpiralParams{}};
  return c;
}

const SceneIndex& index() {
  static const SceneIndex idx(cochlea().scene());
  return idx;
}

// Contacts on the ST centerline at the given parametric angles, tip first.
std::vector<Vec3> on_centerline(std::vector<double> base_to_tip_deg) {
  std::vector<Vec3> out;
  for (auto it = base_to_tip_deg.rbegin(); it != base_to_tip_deg.rend(); ++it) {
    out.push_back(cochlea().st_center(*it));
  }
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

Vec3 point_in_sv_only() {
  const auto& s = cochlea().scene();
  Vec3 lo, hi;
  oracle::bounds(s.sv, lo, hi, 0.0);
  std::mt19937_64 rng(5);
  for (;;) {
    const Vec3 p = oracle::random_point(rng, lo, hi);
    if (oracle::winding_number(s.sv, p) > 0.5 && oracle::winding_number(s.st, p) < 0.5) {
      return p;
    }
  }
}

template <typename F>
void expect_kind(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Aid, EqualsParametricTipAngle) {
  for (double tip : {180.0, 360.0, 450.0, 600.0}) {
    const auto contacts = on_centerline(linspace(5.0, tip, 22));
    EXPECT_NEAR(compute_aid(cochlea().scene(), contacts), tip, 1.0) << tip;
  }
}

TEST(Aid, AnglesIncreaseBaseToTip) {
  const auto contacts = on_centerline(linspace(0.0, 450.0, 22));
  const auto ang = contact_angles(cochlea().scene().frame, contacts);
  ASSERT_EQ(ang.size(), 22u);
  for (size_t i = 1; i < ang.size(); ++i) EXPECT_GT(ang[i], ang[i - 1]);
}

TEST(Mmd, MatchesBruteForceWallDistance) {
  const auto contacts = on_centerline(linspace(10.0, 450.0, 22));
  double sum = 0.0, apical = 0.0;
  for (size_t i = 0; i < contacts.size(); ++i) {
    const double d = oracle::mesh_distance(cochlea().scene().modiolar_wall, contacts[i]);
    sum += d;
    if (i < 11) apical += d;
  }
  EXPECT_NEAR(compute_mmd(index(), contacts), sum / 22.0, 1e-9);
  EXPECT_NEAR(compute_amd(index(), contacts), apical / 11.0, 1e-9);
}

TEST(Amd, UsesAllContactsWhenFewerThanEleven) {
  const auto contacts = on_centerline(linspace(10.0, 200.0, 6));
  EXPECT_NEAR(compute_amd(index(), contacts), compute_mmd(index(), contacts), 1e-12);
}

TEST(Scalar, CenterlineContactsAreInScalaTympani) {
  const auto contacts = on_centerline(linspace(0.0, 450.0, 22));
  const auto cls = classify_scalar(index(), contacts);
  EXPECT_EQ(cls.label, ScalarLabel::kSt);
  for (auto loc : cls.contacts) EXPECT_EQ(loc, ContactLocation::kSt);
}

TEST(Scalar, OneContactInVestibuliIsATranslocation) {
  auto contacts = on_centerline(linspace(0.0, 450.0, 22));
  contacts[3] = point_in_sv_only();
  const auto cls = classify_scalar(index(), contacts);
  EXPECT_EQ(cls.label, ScalarLabel::kStSv);
  EXPECT_EQ(cls.contacts[3], ContactLocation::kSv);
  contacts[3] = Vec3(100, 100, 100);
  EXPECT_EQ(classify_scalar(index(), contacts).contacts[3], ContactLocation::kOutside);
}

TEST(Fold, ConstructedSequences) {
  const std::vector<double> smooth{0, 40, 80, 120, 160, 200};
  const std::vector<double> folded{0, 40, 80, 120, 85, 60};
  const std::vector<double> small_dip{0, 40, 80, 120, 95, 130};
  EXPECT_FALSE(detect_fold(smooth));
  EXPECT_TRUE(detect_fold(folded));
  EXPECT_FALSE(detect_fold(small_dip));
  EXPECT_TRUE(detect_fold(small_dip, 20.0));
  expect_kind(ErrorKind::kParameter, [] { (void)detect_fold(std::vector<double>{0, 1}); });
}

TEST(Fold, ContactsDoublingBack) {
  // Out to 300 degrees along the centerline, then back to 200.
  std::vector<double> path = linspace(0.0, 300.0, 16);
  for (double a : linspace(285.0, 200.0, 6)) path.push_back(a);
  EXPECT_TRUE(detect_fold(cochlea().scene(), on_centerline(path)));
  EXPECT_FALSE(detect_fold(cochlea().scene(), on_centerline(linspace(0.0, 450.0, 22))));
}

TEST(BaseDepthError, ActualMinusPlanned) {
  EXPECT_DOUBLE_EQ(base_depth_error(1.5, 2.25), 0.75);
  EXPECT_DOUBLE_EQ(base_depth_error(-0.5, -1.0), -0.5);
  expect_kind(ErrorKind::kMissingData, [] { (void)base_depth_error(std::nullopt, 1.0); });
}

TEST(Evaluate, ContactsAndPrecomputedMustAgree) {
  PostOpRecord rec;
  rec.case_id = "x";
  rec.contact_centers = on_centerline(linspace(5.0, 430.0, 22));
  rec.planned_base_depth = 1.0;
  rec.actual_base_depth = 1.4;
  const PositionMetrics derived = evaluate(rec, &index());
  EXPECT_NEAR(derived.aid_deg, 430.0, 1.0);
  EXPECT_NEAR(derived.aid_error_deg, derived.aid_deg - 450.0, 1e-12);
  ASSERT_TRUE(derived.d_mm.has_value());
  EXPECT_NEAR(*derived.d_mm, 0.4, 1e-12);
  EXPECT_FALSE(derived.fold);

  Precomputed pre{derived.aid_deg + 1.0, derived.mmd_mm, derived.amd_mm,
                  ScalarLabel::kSt, false, std::nullopt};
  rec.precomputed = pre;
  EXPECT_NO_THROW((void)evaluate(rec, &index()));
  rec.precomputed->aid_deg = derived.aid_deg + 20.0;
  expect_kind(ErrorKind::kValidation, [&] { (void)evaluate(rec, &index()); });
  rec.precomputed = pre;
  rec.precomputed->scalar = ScalarLabel::kStSv;
  expect_kind(ErrorKind::kValidation, [&] { (void)evaluate(rec, &index()); });
}

TEST(Evaluate, MissingInputs) {
  PostOpRecord rec;
  rec.case_id = "empty";
  expect_kind(ErrorKind::kMissingData, [&] { (void)evaluate(rec, nullptr); });
  rec.contact_centers = on_centerline(linspace(5.0, 430.0, 22));
  expect_kind(ErrorKind::kMissingData, [&] { (void)evaluate(rec, nullptr); });
}

TEST(Evaluate, PrecomputedOnlyPassesThrough) {
  PostOpRecord rec;
  rec.case_id = "p";
  rec.precomputed = Precomputed{410.0, 0.31, 0.22, ScalarLabel::kStSv, true, -0.2};
  const PositionMetrics m = evaluate(rec, nullptr);
  EXPECT_EQ(m.aid_deg, 410.0);
  EXPECT_EQ(m.aid_error_deg, -40.0);
  EXPECT_EQ(m.scalar, ScalarLabel::kStSv);
  EXPECT_TRUE(m.fold);
  EXPECT_EQ(m.d_mm, -0.2);
}

TEST(MetricsCsv, OneRowPerCase) {
  PositionMetrics a;
  a.aid_deg = 431.4;
  a.aid_error_deg = -18.6;
  a.mmd_mm = 0.314;
  a.amd_mm = 0.2;
  a.max_extent_deg = 431.4;
  a.d_mm = 0.25;
  std::ostringstream out;
  write_metrics_csv(out, {"c1"}, {a});
  EXPECT_EQ(out.str(),
            "case_id,d_mm,scalar,folded,aid_deg,aid_error_deg,mmd_mm,amd_mm,max_extent_deg\n"
            "c1,0.25,ST,N,431,-19,0.31,0.20,431\n");
  expect_kind(ErrorKind::kLengthMismatch, [] {
    std::ostringstream o;
    write_metrics_csv(o, {"a", "b"}, {PositionMetrics{}});
  });
}

TEST(ScalarLabel, ParseAcceptsSlashForm) {
  EXPECT_EQ(parse_scalar_label("ST/SV"), ScalarLabel::kStSv);
  EXPECT_EQ(parse_scalar_label("ST"), ScalarLabel::kSt);
  EXPECT_THROW((void)parse_scalar_label("XX"), Error);
}
