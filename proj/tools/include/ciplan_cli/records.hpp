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

#include <string>
#include <vector>

#include "ciplan/metrics/metrics.hpp"

namespace ciplan::cli {

// Post-operative records file:
//   {"units": "mm", "records": [{"case_id": ..., "contact_centers": [[x,y,z], ...],
//     "planned_base_depth": ..., "actual_base_depth": ...,
//     "precomputed": {"aid_deg", "mmd_mm", "amd_mm", "scalar", "fold", "d_mm"}}]}
// Contact centers are tip first. Throws kParse on malformed input.
std::vector<metrics::PostOpRecord> parse_postop_records(
    const std::string& text, const std::string& source);

}  // namespace ciplan::cli
