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

#include "ciplan_cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "ciplan/error.hpp"
#include "commands.hpp"

namespace ciplan::cli {

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

void add_seed(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

void add_plan_inputs(CLI::App* sub, RunConfig& c) {
  sub->add_option("--scene", c.scene, "scene directory, scene.json or bundle")
      ->required();
  sub->add_option("--array-spec", c.array_spec, "array specification JSON");
  sub->add_option("--case-id", c.case_id,
                  "case identifier (default: scene directory name)");
  add_seed(sub, c);
}

void add_stats_inputs(CLI::App* sub, RunConfig& c) {
  sub->add_option("--cohort", c.cohort,
                  std::string("cohort directory or CSV (default: $") +
                      kDataDirEnv + " or ./data)");
  sub->add_flag("--no-power", c.no_power, "skip the power analysis");
  sub->add_option("--mwu-variant", c.mwu_variant,
                  "MWU variant for the diff: normal, normal-cc, exact, auto")
      ->capture_default_str();
  sub->add_option("--reps", c.replicates, "power Monte-Carlo replicates")
      ->capture_default_str();
  sub->add_option("--power-mode", c.power_mode, "equal or fixed-control")
      ->capture_default_str();
  add_seed(sub, c);
}

}  // namespace

std::string directory_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    EVP_DigestUpdate(ctx, name.data(), name.size() + 1);  // keep the NUL
    std::ifstream in(f, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    const std::string bytes = s.str();
    EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  }
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig c;
  CLI::App app{"Cochlear implant insertion planning toolkit", "ciplan"};
  app.set_config("--config", "", "optional TOML/INI file; flags override it");
  app.require_subcommand(1, 1);

  auto* synth = app.add_subcommand("synth", "write a synthetic cochlea scene");
  add_seed(synth, c);
  synth->add_flag("--left", c.left_ear, "left ear (mirrored chirality)");
  synth->add_option("--turns", c.turns_deg, "spiral extent, degrees");
  synth->add_option("--basal-radius", c.basal_radius, "basal ST radius, mm");
  synth->add_option("--recess-width", c.recess_width, "facial recess width, mm");
  synth->add_option("--out", c.out, "scene directory")->required();

  auto* plan = app.add_subcommand("plan", "compute the three candidate plans");
  add_plan_inputs(plan, c);
  plan->add_option("--out", c.out, "also write the scene bundle here");
  auto* sel = plan->add_option("--select", c.select,
                               "entry kind: center, slight, substantial");
  plan->add_option("--selection", c.selection, "selection record JSON")
      ->excludes(sel);
  plan->add_option("--text-out", c.text_out, "plan text file (default stdout)");

  auto* exp = app.add_subcommand("export-scene", "write the scene bundle");
  add_plan_inputs(exp, c);
  exp->add_option("--out", c.out, "bundle directory")->required();

  auto* met = app.add_subcommand("metrics", "position metrics from records");
  met->add_option("--records", c.records, "post-operative records JSON")
      ->required();
  met->add_option("--scene", c.scene, "scene for contact-derived metrics");
  met->add_option("--out", c.out, "metrics CSV (default stdout)");
  met->add_option("--fold-threshold", c.fold_threshold_deg, "degrees");
  met->add_option("--aid-tolerance", c.aid_tolerance_deg, "degrees");
  met->add_option("--distance-tolerance", c.distance_tolerance_mm, "mm");

  auto* st = app.add_subcommand("stats", "reproduce the cohort tables");
  add_stats_inputs(st, c);
  st->add_option("--csv", c.csv_out, "also write the report as CSV");
  st->add_option("--regression", c.regression_out,
                 "also write the regression series CSV");

  auto* rep = app.add_subcommand("report", "write all statistics artifacts");
  add_stats_inputs(rep, c);
  rep->add_option("--out", c.out, "output directory")->required();

  auto* pw = app.add_subcommand("power", "Mann-Whitney sample size");
  pw->add_option("--mean-a", c.mean_a, "control mean")->required();
  pw->add_option("--sd-a", c.sd_a, "control SD")->required();
  pw->add_option("--mean-b", c.mean_b, "experimental mean")->required();
  pw->add_option("--sd-b", c.sd_b, "experimental SD")->required();
  pw->add_option("--mode", c.power_mode, "equal or fixed-control")
      ->capture_default_str();
  pw->add_option("--control-n", c.control_n)->capture_default_str();
  pw->add_option("--alpha", c.alpha)->capture_default_str();
  pw->add_option("--power", c.target_power, "target power")
      ->capture_default_str();
  pw->add_option("--reps", c.replicates)->capture_default_str();
  pw->add_option("--max-n", c.max_n)->capture_default_str();
  pw->add_option("--mwu-variant", c.mwu_variant)->capture_default_str();
  add_seed(pw, c);

  auto* sv = app.add_subcommand("serve", "serve a bundle to the viewer");
  sv->add_option("--bundle", c.bundle, "bundle directory")->required();
  sv->add_option("--host", c.host)->capture_default_str();
  sv->add_option("--port", c.port, "0 picks a free port")->capture_default_str();
  sv->add_option("--selection-out", c.selection_out,
                 "selection record path (default <bundle>/selection.json)");
  sv->add_option("--port-file", c.port_file, "write the bound port here");
  sv->add_flag("--once", c.once, "exit after the selection is recorded");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  c.subcommand = app.get_subcommands().front()->get_name();
  try {
    if (c.subcommand == "synth") return cmd_synth(c, out);
    if (c.subcommand == "plan") return cmd_plan(c, out);
    if (c.subcommand == "export-scene") return cmd_export_scene(c, out);
    if (c.subcommand == "metrics") return cmd_metrics(c, out);
    if (c.subcommand == "stats") return cmd_stats(c, out);
    if (c.subcommand == "report") return cmd_report(c, out);
    if (c.subcommand == "power") return cmd_power(c, out);
    if (c.subcommand == "serve") return cmd_serve(c, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what())
        << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ciplan::cli
