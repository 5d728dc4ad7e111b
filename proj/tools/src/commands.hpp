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

#include "ciplan_cli/cli.hpp"

namespace ciplan::cli {

int cmd_synth(const RunConfig& cfg, std::ostream& out);
int cmd_plan(const RunConfig& cfg, std::ostream& out);
int cmd_export_scene(const RunConfig& cfg, std::ostream& out);
int cmd_metrics(const RunConfig& cfg, std::ostream& out);
int cmd_stats(const RunConfig& cfg, std::ostream& out);
int cmd_power(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);
int cmd_serve(const RunConfig& cfg, std::ostream& out);

}  // namespace ciplan::cli
