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

namespace ciplan::stats {

// Minimal RFC 4180 reader: comma separated, optional double quotes, first
// line is the header. Empty cells stay empty strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // source line of each row

  // Index of a header column, -1 when absent.
  int column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source = "");
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ciplan::stats
