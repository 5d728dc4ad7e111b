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

#include "ciplan/array/array_model.hpp"
#include "ciplan/plan/plan.hpp"

namespace ciplan::plan {

// Surgeon-facing plan text: four paragraphs (entry site, insertion vector,
// base insertion depth, pullback) separated by blank lines. Throws
// kIncompletePlan when a required value is missing or not finite.
std::string emit_plan_text(const InsertionPlan& plan,
                           const array::ArraySpec& spec);

std::string entry_site_name(EntryKind kind);

}  // namespace ciplan::plan
