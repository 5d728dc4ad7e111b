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

#include "ciplan/io/bundle.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ciplan/error.hpp"
#include "ciplan/geometry/mesh_io.hpp"

namespace ciplan::io {
namespace {

using nlohmann::json;
using geometry::Vec3;

constexpr int kFormatVersion = 1;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json points(const std::vector<Vec3>& pts) {
  json out = json::array();
  for (const Vec3& p : pts) out.push_back(vec(p));
  return out;
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::kParse, what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    bad(std::string("manifest is missing '") + key + "'");
  }
  return obj.at(key);
}

double number(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Vec3 to_vec(const json& v) {
  if (!v.is_array() || v.size() != 3) bad("expected a 3-element array");
  for (const auto& c : v) {
    if (!c.is_number()) bad("expected numeric coordinates");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<Vec3> to_points(const json& v) {
  if (!v.is_array()) bad("expected an array of points");
  std::vector<Vec3> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(to_vec(p));
  return out;
}

std::vector<double> to_numbers(const json& v) {
  if (!v.is_array()) bad("expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) bad("expected a number");
    out.push_back(x.get<double>());
  }
  return out;
}

void check_units(const json& obj) {
  if (field(obj, "units") != "mm") bad("units must be \"mm\"");
}

const std::vector<std::pair<const char*, geometry::TriMesh geometry::CochlearScene::*>>&
mesh_members() {
  static const std::vector<
      std::pair<const char*, geometry::TriMesh geometry::CochlearScene::*>>
      members{{"st", &geometry::CochlearScene::st},
              {"sv", &geometry::CochlearScene::sv},
              {"modiolar_wall", &geometry::CochlearScene::modiolar_wall},
              {"ossicles", &geometry::CochlearScene::ossicles}};
  return members;
}

json tube_json(const geometry::CenterlineTube& tube) {
  return {{"centerline", points(tube.centerline)}, {"radius", tube.radius}};
}

geometry::CenterlineTube tube_from(const json& j, const char* label) {
  geometry::CenterlineTube tube;
  tube.label = label;
  tube.centerline = to_points(field(j, "centerline"));
  tube.radius = to_numbers(field(j, "radius"));
  tube.validate();
  return tube;
}

json frame_json(const geometry::CochlearFrame& f) {
  return {{"modiolar_axis", vec(f.modiolar_axis)},
          {"apex_origin", vec(f.apex_origin)},
          {"rw_center", vec(f.rw_center)},
          {"rw_plane_normal", vec(f.rw_plane_normal)},
          {"zero_angle_ray", vec(f.zero_angle_ray)},
          {"stapes_center", vec(f.stapes_center)},
          {"winding", f.winding}};
}

geometry::CochlearFrame frame_from(const json& j) {
  geometry::CochlearFrame f;
  f.modiolar_axis = to_vec(field(j, "modiolar_axis"));
  f.apex_origin = to_vec(field(j, "apex_origin"));
  f.rw_center = to_vec(field(j, "rw_center"));
  f.rw_plane_normal = to_vec(field(j, "rw_plane_normal"));
  f.zero_angle_ray = to_vec(field(j, "zero_angle_ray"));
  f.stapes_center = to_vec(field(j, "stapes_center"));
  f.winding = field(j, "winding").get<int>();
  return f;
}

json scene_json(const geometry::CochlearScene& scene) {
  json meshes = json::object();
  for (const auto& [name, member] : mesh_members()) {
    meshes[name] = std::string(name) + ".ply";
  }
  return {{"format", "ciplan-scene"},
          {"version", kFormatVersion},
          {"units", "mm"},
          {"meshes", meshes},
          {"tubes",
           {{"facial_nerve", tube_json(scene.facial_nerve)},
            {"chorda", tube_json(scene.chorda)}}},
          {"frame", frame_json(scene.frame)},
          {"st_centerline",
           {{"points", points(scene.st_centerline.points)},
            {"angle_deg", scene.st_centerline.angle_deg}}}};
}

geometry::CochlearScene scene_from(const json& j, const fs::path& dir) {
  check_units(j);
  geometry::CochlearScene scene;
  const json& meshes = field(j, "meshes");
  for (const auto& [name, member] : mesh_members()) {
    const json& file = field(meshes, name);
    if (!file.is_string()) bad(std::string("mesh entry '") + name + "' must be a file name");
    const fs::path rel(file.get<std::string>());
    if (rel.is_absolute() || rel.filename() != rel) {
      bad("mesh payloads must be plain file names");
    }
    scene.*member = geometry::load_mesh(dir / rel, name);
  }
  const json& tubes = field(j, "tubes");
  scene.facial_nerve = tube_from(field(tubes, "facial_nerve"), "facial_nerve");
  scene.chorda = tube_from(field(tubes, "chorda"), "chorda");
  scene.frame = frame_from(field(j, "frame"));
  const json& cl = field(j, "st_centerline");
  scene.st_centerline.points = to_points(field(cl, "points"));
  scene.st_centerline.angle_deg = to_numbers(field(cl, "angle_deg"));
  try {
    scene.validate();
  } catch (const Error& e) {
    bad(std::string("invalid scene: ") + e.what());
  }
  return scene;
}

void write_meshes(const fs::path& dir, const geometry::CochlearScene& scene) {
  for (const auto& [name, member] : mesh_members()) {
    geometry::save_mesh(dir / (std::string(name) + ".ply"), scene.*member);
  }
}

json pose_json(const geometry::RigidTransform& t) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    rot.push_back({t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2)});
  }
  return {{"rotation", rot}, {"translation", vec(t.translation)}};
}

geometry::RigidTransform pose_from(const json& j) {
  geometry::RigidTransform t;
  const json& rot = field(j, "rotation");
  if (!rot.is_array() || rot.size() != 3) bad("rotation must be 3x3");
  for (int r = 0; r < 3; ++r) {
    const Vec3 row = to_vec(rot[static_cast<size_t>(r)]);
    t.rotation.row(r) = row.transpose();
  }
  t.translation = to_vec(field(j, "translation"));
  return t;
}

json spec_json(const array::ArraySpec& s) {
  return {{"contact_count", s.contact_count},
          {"active_length", s.active_length},
          {"design_curl", s.design_curl},
          {"marker_offsets", s.marker_offsets},
          {"tip_taper", s.tip_taper}};
}

array::ArraySpec spec_from(const json& j) {
  if (!j.is_object()) bad("array spec must be a JSON object");
  array::ArraySpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "contact_count") s.contact_count = value.get<int>();
    else if (key == "active_length") s.active_length = value.get<double>();
    else if (key == "design_curl") s.design_curl = value.get<double>();
    else if (key == "tip_taper") s.tip_taper = value.get<double>();
    else if (key == "marker_offsets") {
      const auto v = to_numbers(value);
      if (v.size() != 3) bad("marker_offsets needs exactly 3 values");
      s.marker_offsets = {v[0], v[1], v[2]};
    } else {
      bad("unknown array spec key '" + key + "'");
    }
  }
  return s;
}

json shape_json(const array::RestingShape& s) {
  return {{"centerline", points(s.centerline)},
          {"contact_centers", points(s.contact_centers)},
          {"marker_points",
           points({s.marker_points[0], s.marker_points[1], s.marker_points[2]})},
          {"apical_index_set", s.apical_index_set},
          {"plane_normal", vec(s.plane_normal)}};
}

array::RestingShape shape_from(const json& j) {
  array::RestingShape s;
  s.centerline = to_points(field(j, "centerline"));
  s.contact_centers = to_points(field(j, "contact_centers"));
  const auto markers = to_points(field(j, "marker_points"));
  if (markers.size() != 3) bad("marker_points needs exactly 3 points");
  s.marker_points = {markers[0], markers[1], markers[2]};
  s.apical_index_set = field(j, "apical_index_set").get<std::vector<int>>();
  s.plane_normal = to_vec(field(j, "plane_normal"));
  return s;
}

json plan_json(const plan::InsertionPlan& p, const std::string& text) {
  return {{"entry_kind", plan::to_string(p.entry.kind)},
          {"entry_point", vec(p.entry.point)},
          {"vector", vec(p.vector)},
          {"clearance_fn", p.clearance_fn},
          {"clearance_chorda", p.clearance_chorda},
          {"clearance_ossicles", p.clearance_ossicles},
          {"tilt_deg", p.tilt_deg},
          {"curl_clock", p.curl_clock ? json(p.curl_clock->str()) : json(nullptr)},
          {"entry_clock", p.entry_clock ? json(p.entry_clock->str()) : json(nullptr)},
          {"base_depth", p.base_depth},
          {"overinsert_depth", p.overinsert_depth},
          {"registered_pose", pose_json(p.registered_pose)},
          {"predicted_aid", p.predicted_aid},
          {"predicted_mmd", p.predicted_mmd},
          {"text", text}};
}

plan::InsertionPlan plan_from(const json& j, std::string& text) {
  plan::InsertionPlan p;
  p.entry.kind = plan::parse_entry_kind(field(j, "entry_kind").get<std::string>());
  p.entry.point = to_vec(field(j, "entry_point"));
  p.vector = to_vec(field(j, "vector"));
  p.clearance_fn = number(j, "clearance_fn");
  p.clearance_chorda = number(j, "clearance_chorda");
  p.clearance_ossicles = number(j, "clearance_ossicles");
  p.tilt_deg = number(j, "tilt_deg");
  const json& curl = field(j, "curl_clock");
  if (!curl.is_null()) p.curl_clock = plan::ClockFace::parse(curl.get<std::string>());
  const json& entry = field(j, "entry_clock");
  if (!entry.is_null()) p.entry_clock = plan::ClockFace::parse(entry.get<std::string>());
  p.base_depth = number(j, "base_depth");
  p.overinsert_depth = number(j, "overinsert_depth");
  p.registered_pose = pose_from(field(j, "registered_pose"));
  p.predicted_aid = number(j, "predicted_aid");
  p.predicted_mmd = number(j, "predicted_mmd");
  text = field(j, "text").get<std::string>();
  return p;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(what + ": " + e.what());
  }
}

fs::path manifest_path(const fs::path& path, const char* manifest) {
  return fs::is_directory(path) ? path / manifest : path;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "cannot create directory " + dir.string());
  }
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

void write_scene(const fs::path& dir, const geometry::CochlearScene& scene) {
  ensure_dir(dir);
  write_meshes(dir, scene);
  write_text_file(dir / kSceneManifest, scene_json(scene).dump(2) + "\n");
}

geometry::CochlearScene read_scene(const fs::path& path) {
  const fs::path manifest = manifest_path(path, kSceneManifest);
  const json j = parse_json(read_text_file(manifest), manifest.string());
  // A bundle manifest carries the scene under "scene".
  if (j.contains("scene")) return scene_from(j.at("scene"), manifest.parent_path());
  return scene_from(j, manifest.parent_path());
}

std::vector<std::string> payload_files(const geometry::CochlearScene&) {
  std::vector<std::string> out;
  for (const auto& [name, member] : mesh_members()) {
    out.push_back(std::string(name) + ".ply");
  }
  return out;
}

void export_scene_bundle(const fs::path& dir, const Bundle& bundle) {
  if (bundle.plans.empty()) {
    throw Error(ErrorKind::kParameter, "a bundle needs at least one plan");
  }
  if (bundle.plan_texts.size() != bundle.plans.size()) {
    throw Error(ErrorKind::kLengthMismatch, "one plan text per plan");
  }
  ensure_dir(dir);
  write_meshes(dir, bundle.scene);
  json plans = json::array();
  for (size_t i = 0; i < bundle.plans.size(); ++i) {
    plans.push_back(plan_json(bundle.plans[i], bundle.plan_texts[i]));
  }
  const json j{{"format", "ciplan-bundle"},
               {"version", kFormatVersion},
               {"units", "mm"},
               {"case_id", bundle.case_id},
               {"scene", scene_json(bundle.scene)},
               {"array", {{"spec", spec_json(bundle.spec)},
                          {"resting_shape", shape_json(bundle.shape)}}},
               {"plans", plans}};
  write_text_file(dir / kBundleManifest, j.dump(2) + "\n");
}

Bundle import_scene_bundle(const fs::path& path) {
  const fs::path manifest = manifest_path(path, kBundleManifest);
  const json j = parse_json(read_text_file(manifest), manifest.string());
  if (field(j, "format") != "ciplan-bundle") bad("not a ciplan bundle");
  check_units(j);
  Bundle b;
  b.case_id = field(j, "case_id").get<std::string>();
  b.scene = scene_from(field(j, "scene"), manifest.parent_path());
  const json& arr = field(j, "array");
  b.spec = spec_from(field(arr, "spec"));
  b.shape = shape_from(field(arr, "resting_shape"));
  const json& plans = field(j, "plans");
  if (!plans.is_array() || plans.empty()) bad("bundle lists no plans");
  for (const auto& p : plans) {
    std::string text;
    b.plans.push_back(plan_from(p, text));
    b.plan_texts.push_back(text);
  }
  return b;
}

std::string selection_to_json(const SelectionRecord& r) {
  const json j{{"case_id", r.case_id},
               {"selected_entry_kind", plan::to_string(r.selected_entry_kind)},
               {"timestamp", r.timestamp}};
  return j.dump(2) + "\n";
}

SelectionRecord selection_from_json(const std::string& text) {
  const json j = parse_json(text, "selection record");
  SelectionRecord r;
  const json& id = field(j, "case_id");
  const json& kind = field(j, "selected_entry_kind");
  const json& ts = field(j, "timestamp");
  if (!id.is_string() || !kind.is_string() || !ts.is_string()) {
    bad("selection record fields must be strings");
  }
  r.case_id = id.get<std::string>();
  r.selected_entry_kind = plan::parse_entry_kind(kind.get<std::string>());
  r.timestamp = ts.get<std::string>();
  return r;
}

void write_selection(const fs::path& path, const SelectionRecord& record) {
  write_text_file(path, selection_to_json(record));
}

SelectionRecord read_selection(const fs::path& path) {
  return selection_from_json(read_text_file(path));
}

array::ArraySpec array_spec_from_json(const std::string& text) {
  const array::ArraySpec s = spec_from(parse_json(text, "array spec"));
  s.validate();
  return s;
}

std::string array_spec_to_json(const array::ArraySpec& spec) {
  return spec_json(spec).dump(2) + "\n";
}

}  // namespace ciplan::io
