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

#include <filesystem>
#include <string>
#include <vector>

#include "ciplan/array/array_model.hpp"
#include "ciplan/geometry/types.hpp"
#include "ciplan/plan/plan.hpp"

namespace ciplan::io {

namespace fs = std::filesystem;

inline constexpr const char* kSceneManifest = "scene.json";
inline constexpr const char* kBundleManifest = "bundle.json";

// Scene directory: scene.json plus one ASCII PLY per mesh.
void write_scene(const fs::path& dir, const geometry::CochlearScene& scene);
// Accepts the directory or the manifest path.
geometry::CochlearScene read_scene(const fs::path& path);

struct Bundle {
  std::string case_id;
  geometry::CochlearScene scene;
  array::ArraySpec spec;
  array::RestingShape shape;  // array-local resting shape
  std::vector<plan::InsertionPlan> plans;
  std::vector<std::string> plan_texts;  // one per plan
};

// Writes bundle.json and the mesh payloads into `dir` (created if needed).
void export_scene_bundle(const fs::path& dir, const Bundle& bundle);
Bundle import_scene_bundle(const fs::path& path);

// Mesh payload names referenced by a bundle or scene manifest.
std::vector<std::string> payload_files(const geometry::CochlearScene& scene);

struct SelectionRecord {
  std::string case_id;
  plan::EntryKind selected_entry_kind = plan::EntryKind::kRwCenter;
  std::string timestamp;  // ISO-8601 UTC
};

std::string selection_to_json(const SelectionRecord& record);
SelectionRecord selection_from_json(const std::string& text);
void write_selection(const fs::path& path, const SelectionRecord& record);
SelectionRecord read_selection(const fs::path& path);

// Array specification from a JSON configuration object; keys not present
// keep their defaults.
array::ArraySpec array_spec_from_json(const std::string& text);
std::string array_spec_to_json(const array::ArraySpec& spec);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace ciplan::io
