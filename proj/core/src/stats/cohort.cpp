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

#include "ciplan/stats/cohort.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ciplan/error.hpp"
#include "ciplan/stats/csv.hpp"

namespace ciplan::stats {
namespace {

const std::vector<std::string> kTemporalBoneColumns{
    "specimen", "condition", "group",  "d_mm",  "scalar",
    "fold",     "aid_deg",   "mmd_mm", "amd_mm"};
const std::vector<std::string> kClinicalColumns{
    "subject",     "condition",       "group",
    "side",        "dur_hl_yrs",      "wear_hrs_day",
    "age_implant_yrs", "age_test_yrs", "hearing_config",
    "first_ear",   "etiology",        "sex",
    "d_mm",        "scalar",          "aid_deg",
    "mmd_mm",      "amd_mm",          "cnc_implant_only_pct",
    "cnc_bimodal_pct"};
const std::set<std::string> kClinicalMetricColumns{
    "subject", "condition", "group",  "d_mm",   "scalar",
    "aid_deg", "mmd_mm",    "amd_mm", "cnc_implant_only_pct",
    "cnc_bimodal_pct"};

class RowReader {
 public:
  RowReader(const CsvTable& t, size_t r, std::string source)
      : t_(t), r_(r), source_(std::move(source)) {}

  const std::string& raw(const std::string& col) const {
    return t_.rows[r_][static_cast<size_t>(t_.column(col))];
  }
  [[noreturn]] void fail(const std::string& col, const std::string& why) const {
    throw Error(ErrorKind::kParse, source_ + ":" +
                                       std::to_string(t_.line_numbers[r_]) +
                                       ": column '" + col + "': " + why);
  }
  std::optional<double> number(const std::string& col) const {
    const std::string& s = raw(col);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail(col, "not a number: '" + s + "'");
    }
    return v;
  }
  double required(const std::string& col) const {
    const auto v = number(col);
    if (!v) fail(col, "value required");
    return *v;
  }
  bool yes_no(const std::string& col) const {
    const std::string& s = raw(col);
    if (s == "Y") return true;
    if (s == "N") return false;
    fail(col, "expected Y or N, found '" + s + "'");
  }
  template <typename F>
  auto parsed(const std::string& col, F&& f) const {
    try {
      return f(raw(col));
    } catch (const Error& e) {
      fail(col, e.what());
    }
  }

 private:
  const CsvTable& t_;
  size_t r_;
  std::string source_;
};

void require_columns(const CsvTable& t, const std::vector<std::string>& cols,
                     const std::string& source) {
  if (t.header != cols) {
    std::string want;
    for (const auto& c : cols) want += (want.empty() ? "" : ",") + c;
    throw Error(ErrorKind::kParse,
                source + ":1: header does not match schema (" + want + ")");
  }
}

void check_cnc(const RowReader& rr, const std::optional<double>& v,
               const std::string& col) {
  if (v && (*v < 0.0 || *v > 100.0)) rr.fail(col, "CNC outside [0, 100]");
}

void check_depth(const RowReader& rr, const CohortRow& row) {
  if (row.condition == Condition::kControl && row.d_mm) {
    rr.fail("d_mm", "base depth error on a control row");
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string to_string(Study s) {
  return s == Study::kTemporalBone ? "TEMPORAL_BONE" : "CLINICAL";
}
std::string to_string(Condition c) {
  return c == Condition::kControl ? "CONTROL" : "EXPERIMENTAL";
}
std::string to_string(GroupTag g) {
  switch (g) {
    case GroupTag::kC1: return "C1";
    case GroupTag::kC2: return "C2";
    case GroupTag::kBeforePullback: return "BEFORE_PULLBACK";
    case GroupTag::kExp: return "EXP";
    case GroupTag::kContBefore: return "CONT_BEFORE";
    case GroupTag::kContDuring: return "CONT_DURING";
    case GroupTag::kContAfter: return "CONT_AFTER";
  }
  return "?";
}
std::string to_string(Metric m) {
  switch (m) {
    case Metric::kAid: return "AID";
    case Metric::kMmd: return "MMD";
    case Metric::kAmd: return "AMD";
    case Metric::kCncImplantOnly: return "CNC_IMPLANT_ONLY";
    case Metric::kCncBimodal: return "CNC_BIMODAL";
  }
  return "?";
}

Condition parse_condition(const std::string& text) {
  if (text == "CONTROL") return Condition::kControl;
  if (text == "EXPERIMENTAL") return Condition::kExperimental;
  throw Error(ErrorKind::kParse, "unknown condition '" + text + "'");
}

GroupTag parse_group_tag(const std::string& text) {
  for (GroupTag g : {GroupTag::kC1, GroupTag::kC2, GroupTag::kBeforePullback,
                     GroupTag::kExp, GroupTag::kContBefore,
                     GroupTag::kContDuring, GroupTag::kContAfter}) {
    if (to_string(g) == text) return g;
  }
  throw Error(ErrorKind::kParse, "unknown group tag '" + text + "'");
}

std::optional<double> CohortRow::value(Metric m) const {
  switch (m) {
    case Metric::kAid: return aid_deg;
    case Metric::kMmd: return mmd_mm;
    case Metric::kAmd: return amd_mm;
    case Metric::kCncImplantOnly: return cnc_implant_only_pct;
    case Metric::kCncBimodal: return cnc_bimodal_pct;
  }
  return std::nullopt;
}

std::vector<CohortRow> parse_temporal_bone(const std::string& csv_text,
                                           const std::string& source) {
  const std::string src = source.empty() ? "temporal_bone.csv" : source;
  const CsvTable t = parse_csv(csv_text, src);
  require_columns(t, kTemporalBoneColumns, src);
  std::vector<CohortRow> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const RowReader rr(t, r, src);
    CohortRow row;
    row.study = Study::kTemporalBone;
    row.case_id = rr.raw("specimen");
    if (row.case_id.empty()) rr.fail("specimen", "value required");
    row.condition = rr.parsed("condition", parse_condition);
    row.group = rr.parsed("group", parse_group_tag);
    row.d_mm = rr.number("d_mm");
    row.scalar = rr.parsed("scalar", metrics::parse_scalar_label);
    row.fold = rr.yes_no("fold");
    row.aid_deg = rr.required("aid_deg");
    row.mmd_mm = rr.required("mmd_mm");
    row.amd_mm = rr.required("amd_mm");
    check_depth(rr, row);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<CohortRow> parse_clinical(const std::string& csv_text,
                                      const std::string& source) {
  const std::string src = source.empty() ? "clinical.csv" : source;
  const CsvTable t = parse_csv(csv_text, src);
  require_columns(t, kClinicalColumns, src);
  std::vector<CohortRow> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const RowReader rr(t, r, src);
    CohortRow row;
    row.study = Study::kClinical;
    const std::string& subject = rr.raw("subject");
    if (subject.empty()) rr.fail("subject", "value required");
    // Subjects implanted on both sides appear twice; the side keeps case ids
    // unique.
    row.case_id = "S" + subject + rr.raw("side");
    row.condition = rr.parsed("condition", parse_condition);
    row.group = rr.parsed("group", parse_group_tag);
    row.d_mm = rr.number("d_mm");
    row.scalar = rr.parsed("scalar", metrics::parse_scalar_label);
    row.fold = false;  // no folded arrays in the clinical series
    row.aid_deg = rr.required("aid_deg");
    row.mmd_mm = rr.required("mmd_mm");
    row.amd_mm = rr.required("amd_mm");
    row.cnc_implant_only_pct = rr.number("cnc_implant_only_pct");
    row.cnc_bimodal_pct = rr.number("cnc_bimodal_pct");
    check_cnc(rr, row.cnc_implant_only_pct, "cnc_implant_only_pct");
    check_cnc(rr, row.cnc_bimodal_pct, "cnc_bimodal_pct");
    check_depth(rr, row);
    for (size_t c = 0; c < t.header.size(); ++c) {
      if (!kClinicalMetricColumns.contains(t.header[c])) {
        row.demographics.emplace_back(t.header[c], t.rows[r][c]);
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<CohortRow> ingest_cohort(const std::filesystem::path& path) {
  std::vector<CohortRow> rows;
  auto load = [&rows](const std::filesystem::path& p) {
    const std::string text = read_file(p);
    const std::string first = text.substr(0, text.find('\n'));
    std::vector<CohortRow> part;
    if (first.rfind("specimen,", 0) == 0) {
      part = parse_temporal_bone(text, p.filename().string());
    } else if (first.rfind("subject,", 0) == 0) {
      part = parse_clinical(text, p.filename().string());
    } else {
      throw Error(ErrorKind::kParse,
                  p.filename().string() + ":1: unrecognized cohort header");
    }
    rows.insert(rows.end(), part.begin(), part.end());
  };
  if (std::filesystem::is_directory(path)) {
    bool found = false;
    for (const char* name : {"temporal_bone.csv", "clinical.csv"}) {
      const auto p = path / name;
      if (std::filesystem::exists(p)) {
        load(p);
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorKind::kIo,
                  "no temporal_bone.csv or clinical.csv in " + path.string());
    }
  } else {
    load(path);
  }
  return rows;
}

std::vector<CohortRow> select(std::span<const CohortRow> rows,
                              const RowFilter& keep) {
  std::vector<CohortRow> out;
  for (const CohortRow& r : rows) {
    if (keep(r)) out.push_back(r);
  }
  return out;
}

std::vector<double> values(std::span<const CohortRow> rows, Metric m) {
  std::vector<double> out;
  for (const CohortRow& r : rows) {
    if (const auto v = r.value(m)) out.push_back(*v);
  }
  return out;
}

namespace groups {

RowFilter study(Study s) {
  return [s](const CohortRow& r) { return r.study == s; };
}
RowFilter tag(GroupTag g) {
  return [g](const CohortRow& r) { return r.group == g; };
}
RowFilter tag_wt(GroupTag g) {
  return [g](const CohortRow& r) { return r.group == g && r.well_placed(); };
}
RowFilter control_wt(Study s) {
  return [s](const CohortRow& r) {
    return r.study == s && r.condition == Condition::kControl &&
           r.well_placed();
  };
}
RowFilter experimental(Study s) {
  return [s](const CohortRow& r) {
    return r.study == s && r.group == GroupTag::kExp;
  };
}
RowFilter experimental_depth_ok(Study s, double limit_mm) {
  return [s, limit_mm](const CohortRow& r) {
    return r.study == s && r.group == GroupTag::kExp && r.d_mm &&
           std::abs(*r.d_mm) < limit_mm;
  };
}
RowFilter pooled_control_wt() {
  return [](const CohortRow& r) {
    return r.condition == Condition::kControl && r.well_placed();
  };
}
RowFilter pooled_experimental() {
  return [](const CohortRow& r) { return r.group == GroupTag::kExp; };
}
RowFilter pooled_experimental_depth_ok(double limit_mm) {
  return [limit_mm](const CohortRow& r) {
    return r.group == GroupTag::kExp && r.d_mm && std::abs(*r.d_mm) < limit_mm;
  };
}

}  // namespace groups

}  // namespace ciplan::stats
