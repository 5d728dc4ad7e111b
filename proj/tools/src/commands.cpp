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

#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "ciplan/error.hpp"
#include "ciplan/geometry/scene_index.hpp"
#include "ciplan/geometry/synth.hpp"
#include "ciplan/io/bundle.hpp"
#include "ciplan/metrics/metrics.hpp"
#include "ciplan/plan/plan.hpp"
#include "ciplan/plan/plan_text.hpp"
#include "ciplan/stats/cohort.hpp"
#include "ciplan/stats/power.hpp"
#include "ciplan/stats/report.hpp"
#include "ciplan_cli/records.hpp"
#include "ciplan_cli/serve.hpp"

namespace ciplan::cli {

namespace {

void require_exists(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(ErrorKind::kParameter, std::string(what) + " is required");
  if (!fs::exists(p)) {
    throw Error(ErrorKind::kIo, std::string(what) + " not found: " + p.string());
  }
}

bool is_bundle(const fs::path& p) {
  return p.filename() == io::kBundleManifest ||
         (fs::is_directory(p) && fs::exists(p / io::kBundleManifest));
}

// A scene directory, a scene manifest, or a bundle (directory or manifest).
geometry::CochlearScene load_scene(const fs::path& p) {
  require_exists(p, "--scene");
  return is_bundle(p) ? io::import_scene_bundle(p).scene : io::read_scene(p);
}

array::ArraySpec load_spec(const RunConfig& cfg) {
  if (cfg.array_spec.empty()) return {};
  require_exists(cfg.array_spec, "--array-spec");
  return io::array_spec_from_json(io::read_text_file(cfg.array_spec));
}

std::string default_case_id(const RunConfig& cfg) {
  if (!cfg.case_id.empty()) return cfg.case_id;
  fs::path p = cfg.scene;
  if (!fs::is_directory(p)) p = p.parent_path();
  std::string name = fs::weakly_canonical(p).filename().string();
  return name.empty() ? "case" : name;
}

struct Planned {
  io::Bundle bundle;
};

Planned make_plans(const RunConfig& cfg) {
  Planned r;
  require_exists(cfg.scene, "--scene");
  if (is_bundle(cfg.scene)) {
    // A bundle carries its own case id and array; flags still override.
    const io::Bundle src = io::import_scene_bundle(cfg.scene);
    r.bundle.scene = src.scene;
    r.bundle.spec = cfg.array_spec.empty() ? src.spec : load_spec(cfg);
    r.bundle.case_id = cfg.case_id.empty() ? src.case_id : cfg.case_id;
  } else {
    r.bundle.scene = io::read_scene(cfg.scene);
    r.bundle.spec = load_spec(cfg);
    r.bundle.case_id = default_case_id(cfg);
  }
  r.bundle.shape = array::build_resting_shape(r.bundle.spec);
  plan::PlanOptions options;
  options.registration.seed = cfg.seed;
  const geometry::SceneIndex index(r.bundle.scene);
  plan::PlanSet set =
      plan::candidate_plans(index, r.bundle.shape, r.bundle.spec, options);
  r.bundle.plans = std::move(set.plans);
  for (const auto& p : r.bundle.plans) {
    r.bundle.plan_texts.push_back(plan::emit_plan_text(p, r.bundle.spec));
  }
  return r;
}

void write_or_print(const fs::path& path, const std::string& text,
                    std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

fs::path cohort_path(const RunConfig& cfg) {
  if (!cfg.cohort.empty()) return cfg.cohort;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
  return "data";
}

stats::MwuVariant parse_variant(const std::string& s) {
  if (s == "normal") return stats::MwuVariant::kNormal;
  if (s == "normal-cc") return stats::MwuVariant::kNormalCc;
  if (s == "exact") return stats::MwuVariant::kExact;
  if (s == "auto") return stats::MwuVariant::kAuto;
  throw Error(ErrorKind::kParameter, "unknown MWU variant: " + s);
}

stats::PowerOptions power_options(const RunConfig& cfg) {
  stats::PowerOptions o;
  o.mode = stats::parse_power_mode(cfg.power_mode);
  o.control_n = cfg.control_n;
  o.alpha = cfg.alpha;
  o.target_power = cfg.target_power;
  o.replicates = cfg.replicates;
  o.seed = cfg.seed;
  o.max_n = cfg.max_n;
  o.variant = parse_variant(cfg.mwu_variant);
  return o;
}

stats::StatsReport build_report(const RunConfig& cfg) {
  const fs::path path = cohort_path(cfg);
  require_exists(path, "cohort");
  const auto rows = stats::ingest_cohort(path);
  stats::StatsOptions o;
  o.mwu_variant = parse_variant(cfg.mwu_variant);
  o.include_power = !cfg.no_power;
  o.power = power_options(cfg);
  o.power.variant = stats::MwuVariant::kNormal;
  return stats::reproduce_tables(rows, o);
}

void write_regression(const RunConfig& cfg, const fs::path& path) {
  const auto rows = stats::ingest_cohort(cohort_path(cfg));
  std::ostringstream s;
  stats::write_regression_csv(s, stats::fig3_data(rows));
  io::write_text_file(path, s.str());
}

// Per-table PASS/FAIL counts followed by every failing cell.
void write_summary(std::ostream& out, const stats::StatsReport& report) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<int, int>> counts;
  for (const auto& c : report.cells) {
    if (!counts.count(c.table)) order.push_back(c.table);
    auto& [pass, fail] = counts[c.table];
    (c.pass ? pass : fail) += 1;
  }
  for (const auto& t : order) {
    out << "table " << t << ": pass " << counts[t].first << ", fail "
        << counts[t].second << '\n';
  }
  for (const auto& c : report.cells) {
    if (c.pass) continue;
    char line[384];
    std::snprintf(line, sizeof line, "FAIL %s | %s | %s: printed %.*f computed %.*f\n",
                  c.table.c_str(), c.row.c_str(), c.column.c_str(), c.decimals,
                  c.printed, c.decimals + 2, c.computed);
    out << line;
  }
}

}  // namespace

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw Error(ErrorKind::kParameter, "--out is required");
  geometry::SpiralParams p;
  p.seed = cfg.seed;
  p.left_ear = cfg.left_ear;
  if (cfg.turns_deg) p.turns_deg = *cfg.turns_deg;
  if (cfg.basal_radius) p.basal_radius = *cfg.basal_radius;
  if (cfg.recess_width) p.facial_recess_width = *cfg.recess_width;
  io::write_scene(cfg.out, geometry::synth_cochlea(p));
  out << "scene " << cfg.out.string() << " sha256 " << directory_digest(cfg.out)
      << '\n';
  return 0;
}

int cmd_plan(const RunConfig& cfg, std::ostream& out) {
  require_exists(cfg.scene, "--scene");
  if (!cfg.selection.empty()) require_exists(cfg.selection, "--selection");
  const Planned r = make_plans(cfg);
  const io::Bundle& b = r.bundle;

  std::optional<plan::EntryKind> chosen;
  if (!cfg.selection.empty()) {
    const io::SelectionRecord rec = io::read_selection(cfg.selection);
    if (rec.case_id != b.case_id) {
      throw Error(ErrorKind::kValidation,
                  "selection is for case " + rec.case_id + ", not " + b.case_id);
    }
    chosen = rec.selected_entry_kind;
  } else if (!cfg.select.empty()) {
    chosen = plan::parse_entry_kind(cfg.select);
  }

  if (!cfg.out.empty()) io::export_scene_bundle(cfg.out, b);

  std::string text;
  for (size_t i = 0; i < b.plans.size(); ++i) {
    if (chosen && b.plans[i].entry.kind != *chosen) continue;
    if (!chosen) text += "# " + plan::to_string(b.plans[i].entry.kind) + "\n";
    text += b.plan_texts[i];
    if (!chosen && i + 1 < b.plans.size()) text += "\n";
  }
  write_or_print(cfg.text_out, text, out);
  return 0;
}

int cmd_export_scene(const RunConfig& cfg, std::ostream& out) {
  require_exists(cfg.scene, "--scene");
  if (cfg.out.empty()) throw Error(ErrorKind::kParameter, "--out is required");
  const Planned r = make_plans(cfg);
  io::export_scene_bundle(cfg.out, r.bundle);
  out << "bundle " << cfg.out.string() << " sha256 "
      << directory_digest(cfg.out) << '\n';
  return 0;
}

int cmd_metrics(const RunConfig& cfg, std::ostream& out) {
  require_exists(cfg.records, "--records");
  if (!cfg.scene.empty()) require_exists(cfg.scene, "--scene");
  const auto records = parse_postop_records(io::read_text_file(cfg.records),
                                            cfg.records.string());
  std::optional<geometry::SceneIndex> index;
  if (!cfg.scene.empty()) index.emplace(load_scene(cfg.scene));
  metrics::EvaluateOptions o;
  if (cfg.fold_threshold_deg) o.fold_threshold_deg = *cfg.fold_threshold_deg;
  if (cfg.aid_tolerance_deg) o.aid_tolerance_deg = *cfg.aid_tolerance_deg;
  if (cfg.distance_tolerance_mm) o.distance_tolerance_mm = *cfg.distance_tolerance_mm;
  std::vector<std::string> ids;
  std::vector<metrics::PositionMetrics> rows;
  for (const auto& rec : records) {
    ids.push_back(rec.case_id);
    rows.push_back(metrics::evaluate(rec, index ? &*index : nullptr, o));
  }
  std::ostringstream csv;
  metrics::write_metrics_csv(csv, ids, rows);
  write_or_print(cfg.out, csv.str(), out);
  return 0;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const stats::StatsReport report = build_report(cfg);
  write_report_text(out, report);
  if (!cfg.csv_out.empty()) {
    std::ostringstream s;
    write_report_csv(s, report);
    io::write_text_file(cfg.csv_out, s.str());
  }
  if (!cfg.regression_out.empty()) write_regression(cfg, cfg.regression_out);
  return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw Error(ErrorKind::kParameter, "--out is required");
  const stats::StatsReport report = build_report(cfg);
  fs::create_directories(cfg.out);
  std::ostringstream text, csv;
  write_report_text(text, report);
  write_report_csv(csv, report);
  io::write_text_file(cfg.out / "stats_report.txt", text.str());
  io::write_text_file(cfg.out / "stats_report.csv", csv.str());
  write_regression(cfg, cfg.out / "fig3_regression.csv");
  write_summary(out, report);
  return 0;
}

int cmd_power(const RunConfig& cfg, std::ostream& out) {
  const stats::PowerOptions o = power_options(cfg);
  const stats::PowerResult r =
      stats::power_analysis(cfg.mean_a, cfg.sd_a, cfg.mean_b, cfg.sd_b, o);
  char line[256];
  if (r.required_n) {
    std::snprintf(line, sizeof line, "required_n %d power %.4f mode %s\n",
                  *r.required_n, r.achieved_power, to_string(r.mode).c_str());
  } else {
    std::snprintf(line, sizeof line,
                  "required_n unreachable power_at_max_n %.4f max_n %d mode %s\n",
                  r.achieved_power, o.max_n, to_string(r.mode).c_str());
  }
  out << line;
  return 0;
}

int cmd_serve(const RunConfig& cfg, std::ostream& out) {
  require_exists(cfg.bundle, "--bundle");
  ServeOptions o;
  o.bundle = cfg.bundle;
  o.host = cfg.host;
  o.port = cfg.port;
  o.selection_out = cfg.selection_out;
  o.once = cfg.once;
  BundleServer server(o);
  const int port = server.bind();
  if (!cfg.port_file.empty()) io::write_text_file(cfg.port_file, std::to_string(port) + "\n");
  out << "serving http://" << cfg.host << ':' << port << "/bundle" << std::endl;
  server.listen();
  if (const auto sel = server.selection()) {
    out << "selection " << plan::to_string(sel->selected_entry_kind) << '\n';
  }
  return 0;
}

}  // namespace ciplan::cli
