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

#include <fstream>
#include <sstream>

#include "ciplan/error.hpp"
#include "ciplan/geometry/synth.hpp"
#include "ciplan/io/bundle.hpp"
#include "ciplan/plan/plan_text.hpp"

using namespace ciplan;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() /
             ("ciplan_io_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const geometry::CochlearScene& scene() {
  static const auto s = geometry::synth_cochlea({});
  return s;
}

const io::Bundle& bundle() {
  static const io::Bundle b = [] {
    io::Bundle b;
    b.case_id = "synthetic-0";
    b.scene = scene();
    b.shape = array::build_resting_shape(b.spec);
    const geometry::SceneIndex idx(b.scene);
    b.plans = plan::candidate_plans(idx, b.shape, b.spec).plans;
    for (const auto& p : b.plans) b.plan_texts.push_back(plan::emit_plan_text(p, b.spec));
    return b;
  }();
  return b;
}

void expect_same_mesh(const geometry::TriMesh& a, const geometry::TriMesh& b) {
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  EXPECT_EQ(a.triangles, b.triangles);
  for (size_t i = 0; i < a.vertices.size(); ++i) EXPECT_EQ(a.vertices[i], b.vertices[i]);
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

TEST(Scene, WriteReadRoundTripIsLossless) {
  TempDir dir("scene");
  io::write_scene(dir.path, scene());
  const auto back = io::read_scene(dir.path);
  expect_same_mesh(back.st, scene().st);
  expect_same_mesh(back.sv, scene().sv);
  expect_same_mesh(back.modiolar_wall, scene().modiolar_wall);
  expect_same_mesh(back.ossicles, scene().ossicles);
  EXPECT_EQ(back.facial_nerve.centerline, scene().facial_nerve.centerline);
  EXPECT_EQ(back.chorda.radius, scene().chorda.radius);
  EXPECT_EQ(back.frame.rw_center, scene().frame.rw_center);
  EXPECT_EQ(back.frame.winding, scene().frame.winding);
  EXPECT_EQ(back.st_centerline.angle_deg, scene().st_centerline.angle_deg);
  // Manifest path works as well as the directory.
  EXPECT_NO_THROW((void)io::read_scene(dir.path / io::kSceneManifest));
}

TEST(Bundle, RoundTripKeepsPlansAndTexts) {
  TempDir dir("bundle");
  io::export_scene_bundle(dir.path, bundle());
  const io::Bundle back = io::import_scene_bundle(dir.path);
  EXPECT_EQ(back.case_id, bundle().case_id);
  ASSERT_EQ(back.plans.size(), 3u);
  EXPECT_EQ(back.plan_texts, bundle().plan_texts);
  for (size_t i = 0; i < 3; ++i) {
    const auto& a = back.plans[i];
    const auto& b = bundle().plans[i];
    EXPECT_EQ(a.entry.kind, b.entry.kind);
    EXPECT_EQ(a.entry.point, b.entry.point);
    EXPECT_EQ(a.vector, b.vector);
    EXPECT_EQ(a.clearance_fn, b.clearance_fn);
    EXPECT_EQ(a.curl_clock, b.curl_clock);
    EXPECT_EQ(a.entry_clock, b.entry_clock);
    EXPECT_EQ(a.base_depth, b.base_depth);
    EXPECT_EQ(a.overinsert_depth, b.overinsert_depth);
    EXPECT_EQ(a.registered_pose.rotation, b.registered_pose.rotation);
    // Texts re-emitted from the imported numbers are identical.
    EXPECT_EQ(plan::emit_plan_text(a, back.spec), back.plan_texts[i]);
  }
  expect_same_mesh(back.scene.st, scene().st);
  EXPECT_EQ(back.shape.contact_centers, bundle().shape.contact_centers);
}

TEST(Bundle, ExportIsByteIdenticalAcrossRuns) {
  TempDir a("det_a"), b("det_b");
  io::export_scene_bundle(a.path, bundle());
  io::export_scene_bundle(b.path, bundle());
  for (const auto& e : fs::directory_iterator(a.path)) {
    EXPECT_EQ(io::read_text_file(e.path()),
              io::read_text_file(b.path / e.path().filename()))
        << e.path().filename();
  }
}

TEST(Bundle, CorruptManifestIsAParseError) {
  TempDir dir("corrupt");
  io::export_scene_bundle(dir.path, bundle());
  std::string text = io::read_text_file(dir.path / io::kBundleManifest);
  io::write_text_file(dir.path / io::kBundleManifest, text.substr(0, text.size() / 2));
  expect_kind(ErrorKind::kParse, [&] { (void)io::import_scene_bundle(dir.path); });
}

TEST(Bundle, WrongUnitsRejected) {
  TempDir dir("units");
  io::export_scene_bundle(dir.path, bundle());
  std::string text = io::read_text_file(dir.path / io::kBundleManifest);
  const auto pos = text.find("\"units\": \"mm\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 13, "\"units\": \"cm\"");
  io::write_text_file(dir.path / io::kBundleManifest, text);
  EXPECT_THROW((void)io::import_scene_bundle(dir.path), Error);
}

TEST(Bundle, NeedsPlansAndOneTextPerPlan) {
  TempDir dir("invalid");
  io::Bundle b = bundle();
  b.plan_texts.pop_back();
  expect_kind(ErrorKind::kLengthMismatch, [&] { io::export_scene_bundle(dir.path, b); });
  b.plans.clear();
  b.plan_texts.clear();
  expect_kind(ErrorKind::kParameter, [&] { io::export_scene_bundle(dir.path, b); });
}

TEST(Bundle, PayloadsListEveryMesh) {
  const auto files = io::payload_files(scene());
  EXPECT_EQ(files.size(), 4u);
  TempDir dir("payload");
  io::export_scene_bundle(dir.path, bundle());
  for (const auto& f : files) EXPECT_TRUE(fs::exists(dir.path / f)) << f;
}

TEST(Selection, RoundTripsEveryKind) {
  for (auto kind : plan::kAllEntryKinds) {
    io::SelectionRecord r{"case-7", kind, "2026-01-02T03:04:05Z"};
    const auto back = io::selection_from_json(io::selection_to_json(r));
    EXPECT_EQ(back.case_id, r.case_id);
    EXPECT_EQ(back.selected_entry_kind, kind);
    EXPECT_EQ(back.timestamp, r.timestamp);
  }
}

TEST(Selection, MalformedRecordsRejected) {
  EXPECT_THROW((void)io::selection_from_json("{}"), Error);
  EXPECT_THROW((void)io::selection_from_json(
                   R"({"case_id": 3, "selected_entry_kind": "RW_CENTER", "timestamp": "t"})"),
               Error);
  EXPECT_THROW((void)io::selection_from_json(
                   R"({"case_id": "a", "selected_entry_kind": "MIDDLE", "timestamp": "t"})"),
               Error);
  EXPECT_THROW((void)io::selection_from_json("not json"), Error);
}

TEST(ArraySpecJson, OverridesKeepDefaults) {
  const auto s = io::array_spec_from_json(R"({"contact_count": 16, "design_curl": 400})");
  EXPECT_EQ(s.contact_count, 16);
  EXPECT_EQ(s.design_curl, 400.0);
  EXPECT_EQ(s.active_length, array::ArraySpec{}.active_length);
  const auto again = io::array_spec_from_json(io::array_spec_to_json(s));
  EXPECT_EQ(again.contact_count, 16);
  expect_kind(ErrorKind::kParameter,
              [] { (void)io::array_spec_from_json(R"({"contact_count": 1})"); });
}

TEST(TextFiles, MissingFileIsAnIoError) {
  expect_kind(ErrorKind::kIo, [] { (void)io::read_text_file("/nonexistent/ciplan/file"); });
}
