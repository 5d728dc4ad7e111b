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

#include "ciplan_cli/records.hpp"

#include <json.hpp>

#include "ciplan/error.hpp"

namespace ciplan::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::kParse, source + ": " + what);
}

double number(const json& j, const std::string& key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) fail(where, "'" + key + "' must be a number");
  return it->get<double>();
}

std::optional<double> optional_number(const json& j, const std::string& key,
                                      const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(where, "'" + key + "' must be a number or null");
  return it->get<double>();
}

}  // namespace

std::vector<metrics::PostOpRecord> parse_postop_records(
    const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, e.what());
  }
  if (!root.is_object()) fail(source, "top level must be an object");
  if (const auto u = root.find("units"); u != root.end() && *u != "mm") {
    fail(source, "units must be \"mm\"");
  }
  const auto recs = root.find("records");
  if (recs == root.end() || !recs->is_array()) fail(source, "'records' must be an array");

  std::vector<metrics::PostOpRecord> out;
  for (size_t i = 0; i < recs->size(); ++i) {
    const json& r = (*recs)[i];
    const std::string where = source + ": records[" + std::to_string(i) + "]";
    if (!r.is_object()) fail(where, "must be an object");
    metrics::PostOpRecord rec;
    const auto id = r.find("case_id");
    if (id == r.end() || !id->is_string()) fail(where, "'case_id' must be a string");
    rec.case_id = id->get<std::string>();
    if (const auto c = r.find("contact_centers"); c != r.end() && !c->is_null()) {
      if (!c->is_array()) fail(where, "'contact_centers' must be an array");
      for (const auto& p : *c) {
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() ||
            !p[1].is_number() || !p[2].is_number()) {
          fail(where, "contact centers are [x, y, z] triples");
        }
        rec.contact_centers.emplace_back(p[0].get<double>(), p[1].get<double>(),
                                         p[2].get<double>());
      }
    }
    rec.planned_base_depth = optional_number(r, "planned_base_depth", where);
    rec.actual_base_depth = optional_number(r, "actual_base_depth", where);
    if (const auto p = r.find("precomputed"); p != r.end() && !p->is_null()) {
      if (!p->is_object()) fail(where, "'precomputed' must be an object");
      metrics::Precomputed pc;
      pc.aid_deg = number(*p, "aid_deg", where);
      pc.mmd_mm = number(*p, "mmd_mm", where);
      pc.amd_mm = number(*p, "amd_mm", where);
      const auto s = p->find("scalar");
      if (s == p->end() || !s->is_string()) fail(where, "'scalar' must be a string");
      pc.scalar = metrics::parse_scalar_label(s->get<std::string>());
      const auto f = p->find("fold");
      if (f == p->end() || !f->is_boolean()) fail(where, "'fold' must be a boolean");
      pc.fold = f->get<bool>();
      pc.d_mm = optional_number(*p, "d_mm", where);
      rec.precomputed = pc;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ciplan::cli
