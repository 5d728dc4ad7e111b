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

#include "ciplan/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ciplan/error.hpp"
#include "ciplan/geometry/queries.hpp"

namespace ciplan::metrics {
namespace {

void require_contacts(std::span<const Vec3> contacts, size_t n,
                      const char* what) {
  if (contacts.size() < n) {
    throw Error(ErrorKind::kParameter,
                std::string(what) + " needs at least " + std::to_string(n) +
                    " contacts");
  }
}

double mean_wall_distance(const geometry::SceneIndex& index,
                          std::span<const Vec3> contacts) {
  double sum = 0.0;
  for (const Vec3& c : contacts) sum += index.wall().distance(c);
  return sum / static_cast<double>(contacts.size());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string to_string(ScalarLabel label) {
  return label == ScalarLabel::kSt ? "ST" : "ST_SV";
}

ScalarLabel parse_scalar_label(const std::string& text) {
  if (text == "ST") return ScalarLabel::kSt;
  if (text == "ST_SV" || text == "ST/SV") return ScalarLabel::kStSv;
  throw Error(ErrorKind::kParse, "unknown scalar label '" + text + "'");
}

std::string to_string(ContactLocation loc) {
  switch (loc) {
    case ContactLocation::kSt: return "ST";
    case ContactLocation::kSv: return "SV";
    case ContactLocation::kOutside: return "OUTSIDE";
  }
  return "OUTSIDE";
}

std::vector<double> contact_angles(const geometry::CochlearFrame& frame,
                                   std::span<const Vec3> contacts_tip_first) {
  std::vector<Vec3> base_first(contacts_tip_first.rbegin(),
                               contacts_tip_first.rend());
  return geometry::unwind_angle(frame, base_first);
}

double compute_aid(const geometry::CochlearScene& scene,
                   std::span<const Vec3> contacts_tip_first) {
  require_contacts(contacts_tip_first, 2, "AID");
  return contact_angles(scene.frame, contacts_tip_first).back();
}

double compute_mmd(const geometry::SceneIndex& index,
                   std::span<const Vec3> contacts) {
  require_contacts(contacts, 1, "MMD");
  return mean_wall_distance(index, contacts);
}

double compute_amd(const geometry::SceneIndex& index,
                   std::span<const Vec3> contacts_tip_first) {
  require_contacts(contacts_tip_first, 1, "AMD");
  const size_t n = std::min<size_t>(kApicalContacts, contacts_tip_first.size());
  return mean_wall_distance(index, contacts_tip_first.first(n));
}

ScalarClassification classify_scalar(const geometry::SceneIndex& index,
                                     std::span<const Vec3> contacts) {
  ScalarClassification out;
  for (const Vec3& c : contacts) {
    ContactLocation loc = ContactLocation::kOutside;
    if (index.st().contains(c)) loc = ContactLocation::kSt;
    else if (index.sv().contains(c)) loc = ContactLocation::kSv;
    if (loc != ContactLocation::kSt) out.label = ScalarLabel::kStSv;
    out.contacts.push_back(loc);
  }
  return out;
}

bool detect_fold(std::span<const double> angles, double threshold_deg) {
  if (angles.size() < 3) {
    throw Error(ErrorKind::kParameter, "fold detection needs at least 3 contacts");
  }
  double running_max = angles.front();
  for (double a : angles) {
    running_max = std::max(running_max, a);
    if (running_max - a > threshold_deg) return true;
  }
  return false;
}

bool detect_fold(const geometry::CochlearScene& scene,
                 std::span<const Vec3> contacts_tip_first,
                 double threshold_deg) {
  require_contacts(contacts_tip_first, 3, "fold detection");
  const auto angles = contact_angles(scene.frame, contacts_tip_first);
  return detect_fold(angles, threshold_deg);
}

double base_depth_error(std::optional<double> planned,
                        std::optional<double> actual) {
  if (!planned || !actual) {
    throw Error(ErrorKind::kMissingData,
                "base depth error needs both planned and actual depth");
  }
  return *actual - *planned;
}

PositionMetrics evaluate(const PostOpRecord& record,
                         const geometry::SceneIndex* index,
                         const EvaluateOptions& options) {
  const bool have_contacts = !record.contact_centers.empty();
  if (!have_contacts && !record.precomputed) {
    throw Error(ErrorKind::kMissingData,
                "case '" + record.case_id +
                    "' has neither contact centers nor precomputed metrics");
  }
  std::optional<double> d;
  if (record.planned_base_depth && record.actual_base_depth) {
    d = base_depth_error(record.planned_base_depth, record.actual_base_depth);
  }

  std::optional<PositionMetrics> derived;
  if (have_contacts) {
    if (index == nullptr) {
      throw Error(ErrorKind::kMissingData,
                  "contact coordinates need a scene to evaluate");
    }
    const auto& contacts = record.contact_centers;
    PositionMetrics m;
    const auto angles = contact_angles(index->scene().frame, contacts);
    m.aid_deg = angles.back();
    m.max_extent_deg = *std::max_element(angles.begin(), angles.end());
    m.mmd_mm = compute_mmd(*index, contacts);
    m.amd_mm = compute_amd(*index, contacts);
    const auto cls = classify_scalar(*index, contacts);
    m.scalar = cls.label;
    m.contact_locations = cls.contacts;
    m.fold = contacts.size() >= 3 &&
             detect_fold(angles, options.fold_threshold_deg);
    m.d_mm = d;
    m.aid_error_deg = m.aid_deg - kIdealAidDeg;
    derived = m;
  }
  if (!record.precomputed) return *derived;

  const Precomputed& pre = *record.precomputed;
  PositionMetrics out;
  out.aid_deg = pre.aid_deg;
  out.aid_error_deg = pre.aid_deg - kIdealAidDeg;
  out.max_extent_deg = pre.aid_deg;
  out.mmd_mm = pre.mmd_mm;
  out.amd_mm = pre.amd_mm;
  out.scalar = pre.scalar;
  out.fold = pre.fold;
  out.d_mm = pre.d_mm ? pre.d_mm : d;
  if (derived) {
    auto mismatch = [&](const std::string& what) {
      throw Error(ErrorKind::kValidation, "case '" + record.case_id +
                                              "': derived " + what +
                                              " disagrees with precomputed");
    };
    if (std::abs(derived->aid_deg - pre.aid_deg) > options.aid_tolerance_deg) {
      mismatch("AID");
    }
    if (std::abs(derived->mmd_mm - pre.mmd_mm) > options.distance_tolerance_mm) {
      mismatch("MMD");
    }
    if (std::abs(derived->amd_mm - pre.amd_mm) > options.distance_tolerance_mm) {
      mismatch("AMD");
    }
    if (derived->scalar != pre.scalar) mismatch("scalar location");
    if (derived->fold != pre.fold) mismatch("fold flag");
    out.max_extent_deg = derived->max_extent_deg;
    out.contact_locations = derived->contact_locations;
  }
  return out;
}

void write_metrics_csv(std::ostream& out,
                       const std::vector<std::string>& case_ids,
                       const std::vector<PositionMetrics>& rows) {
  if (case_ids.size() != rows.size()) {
    throw Error(ErrorKind::kLengthMismatch, "one case id per metrics row");
  }
  out << "case_id,d_mm,scalar,folded,aid_deg,aid_error_deg,mmd_mm,amd_mm,"
         "max_extent_deg\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const PositionMetrics& m = rows[i];
    out << case_ids[i] << "," << (m.d_mm ? fixed(*m.d_mm, 2) : "") << ","
        << to_string(m.scalar) << "," << (m.fold ? "Y" : "N") << ","
        << fixed(m.aid_deg, 0) << "," << fixed(m.aid_error_deg, 0) << ","
        << fixed(m.mmd_mm, 2) << "," << fixed(m.amd_mm, 2) << ","
        << fixed(m.max_extent_deg, 0) << "\n";
  }
}

}  // namespace ciplan::metrics
