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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ciplan/geometry/scene_index.hpp"

namespace ciplan::metrics {

using geometry::Vec3;

inline constexpr double kIdealAidDeg = 450.0;
inline constexpr double kDefaultFoldThresholdDeg = 30.0;
inline constexpr int kApicalContacts = 11;

enum class ScalarLabel { kSt, kStSv };
enum class ContactLocation { kSt, kSv, kOutside };

std::string to_string(ScalarLabel label);     // "ST" / "ST_SV"
ScalarLabel parse_scalar_label(const std::string& text);  // accepts ST/SV too
std::string to_string(ContactLocation loc);   // "ST" / "SV" / "OUTSIDE"

struct Precomputed {
  double aid_deg = 0.0;
  double mmd_mm = 0.0;
  double amd_mm = 0.0;
  ScalarLabel scalar = ScalarLabel::kSt;
  bool fold = false;
  std::optional<double> d_mm;
};

struct PostOpRecord {
  std::string case_id;
  std::vector<Vec3> contact_centers;  // tip first; may be empty
  std::optional<double> planned_base_depth;
  std::optional<double> actual_base_depth;
  std::optional<Precomputed> precomputed;
};

struct PositionMetrics {
  double aid_deg = 0.0;
  double aid_error_deg = 0.0;
  double max_extent_deg = 0.0;  // largest cumulative angle along the path
  double mmd_mm = 0.0;
  double amd_mm = 0.0;
  ScalarLabel scalar = ScalarLabel::kSt;
  std::vector<ContactLocation> contact_locations;
  bool fold = false;
  std::optional<double> d_mm;
};

// Cumulative angles along the contacts, base to tip (input is tip first).
std::vector<double> contact_angles(const geometry::CochlearFrame& frame,
                                   std::span<const Vec3> contacts_tip_first);

// Angle of the tip contact accumulated from the base.
double compute_aid(const geometry::CochlearScene& scene,
                   std::span<const Vec3> contacts_tip_first);

double compute_mmd(const geometry::SceneIndex& index,
                   std::span<const Vec3> contacts);
// Mean over the 11 most apical contacts (all contacts when fewer).
double compute_amd(const geometry::SceneIndex& index,
                   std::span<const Vec3> contacts_tip_first);

struct ScalarClassification {
  ScalarLabel label = ScalarLabel::kSt;
  std::vector<ContactLocation> contacts;
};
ScalarClassification classify_scalar(const geometry::SceneIndex& index,
                                     std::span<const Vec3> contacts);

// True when the base-to-tip angle sequence drops more than `threshold_deg`
// below its running maximum.
bool detect_fold(std::span<const double> base_to_tip_angles,
                 double threshold_deg = kDefaultFoldThresholdDeg);
bool detect_fold(const geometry::CochlearScene& scene,
                 std::span<const Vec3> contacts_tip_first,
                 double threshold_deg = kDefaultFoldThresholdDeg);

// D = actual - planned; throws kMissingData when either is absent.
double base_depth_error(std::optional<double> planned,
                        std::optional<double> actual);

struct EvaluateOptions {
  double fold_threshold_deg = kDefaultFoldThresholdDeg;
  // Validation: contact-derived and precomputed metrics must agree within
  // these tolerances when both are present.
  double aid_tolerance_deg = 5.0;
  double distance_tolerance_mm = 0.05;
};

// Metrics from contact coordinates (requires `index`) or precomputed values.
// When both are present the contact-derived values are checked against the
// precomputed ones (kValidation on disagreement) and the precomputed values
// are returned.
PositionMetrics evaluate(const PostOpRecord& record,
                         const geometry::SceneIndex* index,
                         const EvaluateOptions& options = {});

// CSV with one row per case.
void write_metrics_csv(std::ostream& out,
                       const std::vector<std::string>& case_ids,
                       const std::vector<PositionMetrics>& rows);

}  // namespace ciplan::metrics
