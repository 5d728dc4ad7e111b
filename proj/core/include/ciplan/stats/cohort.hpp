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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ciplan/metrics/metrics.hpp"

namespace ciplan::stats {

enum class Study { kTemporalBone, kClinical };
enum class Condition { kControl, kExperimental };
// CONT_DURING marks the single clinical control implanted while the
// experimental series was running; it belongs to neither Before nor After.
enum class GroupTag {
  kC1,
  kC2,
  kBeforePullback,
  kExp,
  kContBefore,
  kContDuring,
  kContAfter,
};
enum class Metric { kAid, kMmd, kAmd, kCncImplantOnly, kCncBimodal };

std::string to_string(Study s);
std::string to_string(Condition c);
std::string to_string(GroupTag g);
std::string to_string(Metric m);
Condition parse_condition(const std::string& text);
GroupTag parse_group_tag(const std::string& text);

struct CohortRow {
  Study study = Study::kTemporalBone;
  std::string case_id;
  Condition condition = Condition::kControl;
  GroupTag group = GroupTag::kC1;
  std::optional<double> d_mm;
  metrics::ScalarLabel scalar = metrics::ScalarLabel::kSt;
  bool fold = false;
  double aid_deg = 0.0;
  double mmd_mm = 0.0;
  double amd_mm = 0.0;
  std::optional<double> cnc_implant_only_pct;
  std::optional<double> cnc_bimodal_pct;
  // Remaining columns, carried verbatim (name, value).
  std::vector<std::pair<std::string, std::string>> demographics;

  // Without translocation or fold.
  bool well_placed() const {
    return scalar == metrics::ScalarLabel::kSt && !fold;
  }
  std::optional<double> value(Metric m) const;
};

// Reads temporal_bone.csv and/or clinical.csv. A directory loads both
// files that exist in it; a file is recognized by its header.
std::vector<CohortRow> ingest_cohort(const std::filesystem::path& path);
std::vector<CohortRow> parse_temporal_bone(const std::string& csv_text,
                                           const std::string& source = "");
std::vector<CohortRow> parse_clinical(const std::string& csv_text,
                                      const std::string& source = "");

using RowFilter = std::function<bool(const CohortRow&)>;

std::vector<CohortRow> select(std::span<const CohortRow> rows,
                              const RowFilter& keep);
// Metric values of the rows that have one, in row order.
std::vector<double> values(std::span<const CohortRow> rows, Metric m);

// Named cohort groups used throughout the tables.
namespace groups {
RowFilter study(Study s);
RowFilter tag(GroupTag g);
RowFilter control_wt(Study s);           // controls without translocation/fold
RowFilter tag_wt(GroupTag g);
RowFilter experimental(Study s);         // after pullback / planned
RowFilter experimental_depth_ok(Study s, double limit_mm = 1.5);
RowFilter pooled_control_wt();
RowFilter pooled_experimental();
RowFilter pooled_experimental_depth_ok(double limit_mm = 1.5);
}  // namespace groups

}  // namespace ciplan::stats
