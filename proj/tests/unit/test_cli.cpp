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

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include "ciplan/error.hpp"
#include "ciplan/io/bundle.hpp"
#include "ciplan_cli/cli.hpp"
#include "ciplan_cli/records.hpp"
#include "ciplan_cli/serve.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a _res macro.
#include <httplib.h>

using namespace ciplan;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "ciplan_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Synthetic scene for seed 0, written once per test binary.
fs::path scene_dir() {
  static const fs::path dir = [] {
    const fs::path d = work_dir() / "synthetic-0";
    EXPECT_EQ(run({"synth", "--seed", "0", "--out", d.string()}).code, 0);
    return d;
  }();
  return dir;
}

fs::path bundle_dir() {
  static const fs::path dir = [] {
    const fs::path d = work_dir() / "bundle-0";
    EXPECT_EQ(run({"export-scene", "--scene", scene_dir().string(), "--out", d.string()}).code, 0);
    return d;
  }();
  return dir;
}

std::string digest_of(const std::string& stdout_text) {
  const auto pos = stdout_text.find("sha256 ");
  return pos == std::string::npos ? "" : stdout_text.substr(pos + 7, 64);
}

bool single_line(const std::string& s) {
  return !s.empty() && s.find('\n') == s.size() - 1;
}

}  // namespace

TEST(Cli, NoSubcommandIsAUsageError) {
  const Result r = run({});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(single_line(r.err)) << r.err;
  EXPECT_EQ(r.err.rfind("error: usage: ", 0), 0u);
}

TEST(Cli, UnknownSubcommandAndFlagAreUsageErrors) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const Result r = run({"stats", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(single_line(r.err));
}

TEST(Cli, HelpExitsZero) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("export-scene"), std::string::npos);
}

TEST(Cli, MissingInputIsAComputationFailure) {
  const Result r = run({"plan", "--scene", (work_dir() / "nope").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(single_line(r.err)) << r.err;
  EXPECT_EQ(r.err.rfind("error: io: ", 0), 0u) << r.err;
}

TEST(Cli, SynthIsDeterministic) {
  const fs::path a = work_dir() / "det_a", b = work_dir() / "det_b";
  const Result ra = run({"synth", "--seed", "0", "--out", a.string()});
  const Result rb = run({"synth", "--seed", "0", "--out", b.string()});
  ASSERT_EQ(ra.code, 0);
  ASSERT_EQ(rb.code, 0);
  EXPECT_EQ(digest_of(ra.out), digest_of(rb.out));
  EXPECT_EQ(digest_of(ra.out).size(), 64u);
  EXPECT_EQ(cli::directory_digest(a), cli::directory_digest(b));
  const Result rc = run({"synth", "--seed", "1", "--out", (work_dir() / "det_c").string()});
  EXPECT_NE(digest_of(rc.out), digest_of(ra.out));
}

TEST(Cli, ExportSceneIsDeterministicAndLeavesInputsAlone) {
  const std::string before = cli::directory_digest(scene_dir());
  const fs::path a = work_dir() / "exp_a", b = work_dir() / "exp_b";
  const Result ra = run({"export-scene", "--scene", scene_dir().string(), "--out", a.string()});
  const Result rb = run({"export-scene", "--scene", scene_dir().string(), "--out", b.string()});
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(digest_of(ra.out), digest_of(rb.out));
  EXPECT_EQ(cli::directory_digest(scene_dir()), before);
}

TEST(Cli, PlanSelectMatchesGoldenText) {
  const fs::path text = work_dir() / "plan.txt";
  const Result r = run({"plan", "--scene", bundle_dir().string(), "--select", "substantial",
                        "--text-out", text.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_text_file(text),
            io::read_text_file(CIPLAN_SOURCE_DIR "/golden/plan_synthetic_seed0_substantial.txt"));
}

TEST(Cli, PlanWithoutSelectionPrintsAllThree) {
  const Result r = run({"plan", "--scene", scene_dir().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* k : {"# RW_CENTER", "# SLIGHT_EXTENDED_RW", "# SUBSTANTIAL_EXTENDED_RW"}) {
    EXPECT_NE(r.out.find(k), std::string::npos) << k;
  }
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path cfg = work_dir() / "cfg.toml";
  io::write_text_file(cfg, "[synth]\nseed = 3\n");
  const Result from_file = run({"--config", cfg.string(), "synth", "--out", (work_dir() / "cfg_a").string()});
  const Result flag = run({"synth", "--seed", "3", "--out", (work_dir() / "cfg_b").string()});
  const Result override_ = run({"--config", cfg.string(), "synth", "--seed", "0", "--out",
                                (work_dir() / "cfg_c").string()});
  const Result seed0 = run({"synth", "--seed", "0", "--out", (work_dir() / "cfg_d").string()});
  EXPECT_EQ(digest_of(from_file.out), digest_of(flag.out));
  EXPECT_EQ(digest_of(override_.out), digest_of(seed0.out));
}

TEST(Cli, StatsUsesDataDirEnvironment) {
  ::setenv(cli::kDataDirEnv, CIPLAN_SOURCE_DIR "/data", 1);
  const Result r = run({"stats", "--no-power"});
  ::unsetenv(cli::kDataDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("[table 3]"), std::string::npos);
  EXPECT_NE(r.out.find("cells "), std::string::npos);
}

TEST(Cli, ReportWritesArtifactsAndSummary) {
  const fs::path out = work_dir() / "report";
  const Result r = run({"report", "--cohort", CIPLAN_SOURCE_DIR "/data", "--no-power", "--out",
                        out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"stats_report.txt", "stats_report.csv", "fig3_regression.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_NE(r.out.find("table 3: pass"), std::string::npos);
}

TEST(Cli, PowerPrintsRequiredN) {
  const Result r = run({"power", "--mean-a", "0", "--sd-a", "1", "--mean-b", "1", "--sd-b", "1",
                        "--mode", "equal", "--reps", "1000", "--max-n", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("required_n ", 0), 0u) << r.out;
}

TEST(Cli, MetricsFromRecords) {
  const fs::path rec = work_dir() / "records.json";
  io::write_text_file(rec, R"({"units": "mm", "records": [
    {"case_id": "a", "planned_base_depth": 1.0, "actual_base_depth": 1.5,
     "precomputed": {"aid_deg": 430, "mmd_mm": 0.3, "amd_mm": 0.2, "scalar": "ST", "fold": false}}]})");
  const Result r = run({"metrics", "--records", rec.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("a,0.50,ST,N,430,-20,0.30,0.20,430"), std::string::npos) << r.out;
  io::write_text_file(rec, R"({"records": [{"case_id": 5}]})");
  const Result bad = run({"metrics", "--records", rec.string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.err.rfind("error: parse: ", 0), 0u) << bad.err;
}

TEST(Records, ContactsAreTriples) {
  EXPECT_THROW((void)cli::parse_postop_records(
                   R"({"records": [{"case_id": "a", "contact_centers": [[1, 2]]}]})", "r"),
               Error);
  const auto recs = cli::parse_postop_records(
      R"({"records": [{"case_id": "a", "contact_centers": [[1, 2, 3], [4, 5, 6]]}]})", "r");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].contact_centers[1], geometry::Vec3(4, 5, 6));
}

TEST(Serve, BundleSelectionRoundTrip) {
  const fs::path sel = work_dir() / "served_selection.json";
  fs::remove(sel);
  cli::ServeOptions o;
  o.bundle = bundle_dir();
  o.port = 0;
  o.selection_out = sel;
  cli::BundleServer server(o);
  const int port = server.bind();
  std::thread t([&] { server.listen(); });

  httplib::Client c("127.0.0.1", port);
  auto manifest = c.Get("/bundle");
  ASSERT_TRUE(manifest);
  EXPECT_EQ(manifest->status, 200);
  EXPECT_EQ(manifest->body, io::read_text_file(bundle_dir() / io::kBundleManifest));
  auto ply = c.Get("/bundle/files/st.ply");
  ASSERT_TRUE(ply);
  EXPECT_EQ(ply->status, 200);
  EXPECT_EQ(c.Get("/bundle/files/secret.txt")->status, 404);

  EXPECT_EQ(c.Post("/selection", "not json", "application/json")->status, 400);
  const io::Bundle b = io::import_scene_bundle(bundle_dir());
  const std::string wrong_case = io::selection_to_json(
      {"other", plan::EntryKind::kRwCenter, "2026-01-01T00:00:00Z"});
  EXPECT_EQ(c.Post("/selection", wrong_case, "application/json")->status, 400);
  const std::string body = io::selection_to_json(
      {b.case_id, plan::EntryKind::kSlightExtendedRw, "2026-01-01T00:00:00Z"});
  EXPECT_EQ(c.Post("/selection", body, "application/json")->status, 201);
  EXPECT_EQ(c.Post("/selection", body, "application/json")->status, 409);
  server.stop();
  t.join();

  ASSERT_TRUE(server.selection().has_value());
  EXPECT_EQ(io::read_selection(sel).selected_entry_kind, plan::EntryKind::kSlightExtendedRw);

  // The planner reads back exactly the submitted kind.
  const Result r = run({"plan", "--scene", bundle_dir().string(), "--selection", sel.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("Entry site: Slightly Extended RW.", 0), 0u) << r.out;
}

TEST(Serve, OnceStopsAfterSelection) {
  cli::ServeOptions o;
  o.bundle = bundle_dir();
  o.port = 0;
  o.once = true;
  o.selection_out = work_dir() / "once_selection.json";
  cli::BundleServer server(o);
  const int port = server.bind();
  std::thread t([&] { server.listen(); });
  httplib::Client c("127.0.0.1", port);
  const io::Bundle b = io::import_scene_bundle(bundle_dir());
  const auto res = c.Post("/selection",
                          io::selection_to_json({b.case_id, plan::EntryKind::kRwCenter, "t"}),
                          "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  t.join();  // returns without stop()
  EXPECT_TRUE(fs::exists(o.selection_out));
}
