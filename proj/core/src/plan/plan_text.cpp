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

#include "ciplan/plan/plan_text.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ciplan/error.hpp"

namespace ciplan::plan {
namespace {

std::string fixed(double v, int digits) {
  // Avoid "-0.0" for values that round to zero.
  const double scale = std::pow(10.0, digits);
  if (std::round(std::abs(v) * scale) == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void require(bool ok, const char* field) {
  if (!ok) {
    throw Error(ErrorKind::kIncompletePlan,
                std::string("plan field missing or not finite: ") + field);
  }
}

// "<d> mm past" / "<d> mm outside" relative to the entry point.
std::string depth_phrase(double depth, const char* inward) {
  if (depth < 0.0 && fixed(-depth, 1) != "0.0") {
    return fixed(-depth, 1) + " mm outside";
  }
  return fixed(depth, 1) + " mm " + inward;
}

}  // namespace

std::string entry_site_name(EntryKind kind) {
  switch (kind) {
    case EntryKind::kRwCenter: return "Middle of RW";
    case EntryKind::kSlightExtendedRw: return "Slightly Extended RW";
    case EntryKind::kSubstantialExtendedRw: return "Substantially Extended RW";
  }
  return "Middle of RW";
}

std::string emit_plan_text(const InsertionPlan& plan,
                           const array::ArraySpec& spec) {
  spec.validate();
  require(std::isfinite(plan.clearance_fn), "clearance_fn");
  require(std::isfinite(plan.clearance_chorda), "clearance_chorda");
  require(std::isfinite(plan.clearance_ossicles), "clearance_ossicles");
  require(std::isfinite(plan.tilt_deg), "tilt_deg");
  require(std::isfinite(plan.base_depth), "base_depth");
  require(std::isfinite(plan.overinsert_depth), "overinsert_depth");
  require(plan.curl_clock.has_value(), "curl_clock");
  require(plan.entry.kind == EntryKind::kRwCenter || plan.entry_clock.has_value(),
          "entry_clock");

  std::ostringstream out;
  out << "Entry site: " << entry_site_name(plan.entry.kind) << ".\n\n";
  out << "Insertion vector: Distance of the insertion trajectory from the "
         "facial nerve: "
      << fixed(plan.clearance_fn, 1)
      << " mm. Distance of the insertion trajectory from the chorda: "
      << fixed(plan.clearance_chorda, 1)
      << " mm. Distance of the insertion trajectory from the ossicles: "
      << fixed(plan.clearance_ossicles, 0)
      << " mm. Tilt of the optimal trajectory with the round window plane (0 "
         "degrees indicates perpendicular insertion): "
      << fixed(plan.tilt_deg, 0)
      << " degrees. Curl Direction (considering clock-face centered on the "
         "entry site and the stapes footplate is at 12 o'clock): "
      << plan.curl_clock->str()
      << ". Round window insertion site (considering clock-face centered on "
         "middle of round window and the stapes footplate is at 12 o'clock): "
      << (plan.entry_clock ? plan.entry_clock->str() : std::string("center"))
      << ".\n\n";
  out << "Base insertion depth: The proximal (closest to the surgeon) marker "
         "should be inserted until it is "
      << depth_phrase(plan.overinsert_depth, "past") << " the entry point.\n\n";
  out << "Pullback: After the array is inserted with the proximal (closest to "
         "the surgeon) marker "
      << depth_phrase(plan.overinsert_depth, "inside")
      << " the entry point, then pullback the array until the middle marker "
         "is "
      << depth_phrase(plan.base_depth, "inside") << " the entry point.\n";
  return out.str();
}

}  // namespace ciplan::plan
