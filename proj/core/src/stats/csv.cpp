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

#include "ciplan/stats/csv.hpp"

#include <fstream>
#include <sstream>

#include "ciplan/error.hpp"

namespace ciplan::stats {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  int line = 1;
  int record_line = 1;
  auto where = [&] {
    return (source.empty() ? std::string("csv") : source) + ":" +
           std::to_string(record_line);
  };
  auto finish_record = [&] {
    record.push_back(field);
    field.clear();
    // Skip blank lines.
    if (!(record.size() == 1 && record[0].empty())) {
      if (table.header.empty()) {
        table.header = record;
      } else {
        if (record.size() != table.header.size()) {
          throw Error(ErrorKind::kParse,
                      where() + ": expected " +
                          std::to_string(table.header.size()) +
                          " fields, found " + std::to_string(record.size()));
        }
        table.rows.push_back(record);
        table.line_numbers.push_back(record_line);
      }
    }
    record.clear();
    any = false;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!any) record_line = line;
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      record.push_back(field);
      field.clear();
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      finish_record();
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::kParse, where() + ": unterminated quote");
  if (any) finish_record();
  if (table.header.empty()) {
    throw Error(ErrorKind::kParse,
                (source.empty() ? std::string("csv") : source) +
                    ": missing header");
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.filename().string());
}

}  // namespace ciplan::stats
