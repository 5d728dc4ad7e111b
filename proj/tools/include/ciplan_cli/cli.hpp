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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ciplan::cli {

namespace fs = std::filesystem;

// Everything a single invocation needs, filled from flags (and optionally a
// config file, which flags override).
struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 0;

  // synth
  bool left_ear = false;
  std::optional<double> turns_deg;
  std::optional<double> basal_radius;
  std::optional<double> recess_width;

  // plan / export-scene
  fs::path scene;
  fs::path array_spec;  // JSON overrides for the array specification
  std::string case_id;
  std::string select;   // entry kind, empty: print all three
  fs::path selection;   // selection record to honour instead of --select
  fs::path text_out;

  // metrics
  fs::path records;
  std::optional<double> fold_threshold_deg;
  std::optional<double> aid_tolerance_deg;
  std::optional<double> distance_tolerance_mm;

  // stats / report
  fs::path cohort;
  fs::path csv_out;
  fs::path regression_out;
  bool no_power = false;
  std::string mwu_variant = "normal";

  // power
  double mean_a = 0.0, sd_a = 0.0, mean_b = 0.0, sd_b = 0.0;
  std::string power_mode = "fixed-control";
  int control_n = 37;
  double alpha = 0.05;
  double target_power = 0.80;
  int replicates = 20000;
  int max_n = 10000;

  // serve
  fs::path bundle;
  std::string host = "127.0.0.1";
  int port = 8765;
  fs::path selection_out;
  fs::path port_file;
  bool once = false;

  fs::path out;
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Returns 0 on success, 1 on a computation or I/O failure and
// 2 on a usage error; failures print one "error: <kind>: <message>" line.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Environment variable naming the default cohort directory.
inline constexpr const char* kDataDirEnv = "CIPLAN_DATA_DIR";

// SHA-256 over the regular files of a directory (sorted names, each name
// followed by its bytes), hex encoded.
std::string directory_digest(const fs::path& dir);

}  // namespace ciplan::cli
