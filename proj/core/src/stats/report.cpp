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

#include "ciplan/stats/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "ciplan/error.hpp"

namespace ciplan::stats {
namespace {

using groups::tag;
using groups::tag_wt;

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

class Builder {
 public:
  Builder(std::span<const CohortRow> rows, const StatsOptions& opt)
      : rows_(rows), opt_(opt) {}

  std::vector<CohortRow> rows(const RowFilter& f) const {
    return select(rows_, f);
  }

  void cell(const std::string& table, const std::string& row,
            const std::string& column, double printed, int decimals,
            double computed, double tolerance, std::string detail = {}) {
    ReportCell c;
    c.table = table;
    c.row = row;
    c.column = column;
    c.printed = printed;
    c.decimals = decimals;
    c.computed = computed;
    c.tolerance = tolerance;
    c.pass = std::isfinite(computed) &&
             std::abs(computed - printed) <= tolerance;
    c.detail = std::move(detail);
    report.cells.push_back(std::move(c));
  }

  // "mean (sd)" at the printed precision.
  void summary(const std::string& table, const std::string& row,
               const std::vector<CohortRow>& g, Metric m, double mean,
               double sd, int decimals) {
    const auto v = values(g, m);
    const GroupSummary s = summarize(v);
    const std::string col = to_string(m);
    const std::string n = "n=" + std::to_string(s.n);
    cell(table, row, col + " mean", mean, decimals, s.mean,
         rounding_tolerance(decimals), n);
    cell(table, row, col + " sd", sd, decimals, s.sd_population,
         rounding_tolerance(decimals), n);
  }

  void count(const std::string& table, const std::string& row,
             const std::string& column, int printed, int computed) {
    cell(table, row, column, printed, 0, computed, 0.0);
  }

  void mwu(const std::string& table, const std::string& row,
           const std::vector<CohortRow>& a, const std::vector<CohortRow>& b,
           Metric m, double printed, int decimals, double tolerance) {
    const auto va = values(a, m);
    const auto vb = values(b, m);
    const TestResult used = mann_whitney_u(va, vb, opt_.mwu_variant);
    std::string detail = "U=" + fixed(used.statistic, 1) + " n=" +
                         std::to_string(used.n1) + "/" +
                         std::to_string(used.n2);
    for (MwuVariant v : {MwuVariant::kExact, MwuVariant::kNormalCc,
                         MwuVariant::kNormal}) {
      if (v == opt_.mwu_variant) continue;
      try {
        const TestResult alt = mann_whitney_u(va, vb, v);
        detail += " " + to_string(v) + "=" + fixed(alt.p_value, 4);
      } catch (const Error&) {
        detail += " " + to_string(v) + "=ties";
      }
    }
    cell(table, row, "MWU p " + to_string(m), printed, decimals, used.p_value,
         tolerance, detail + " [" + used.method_variant + "]");
  }

  void bf(const std::string& table, const std::string& row,
          const std::vector<CohortRow>& a, const std::vector<CohortRow>& b,
          Metric m, double printed, double tolerance) {
    const TestResult r = brown_forsythe(values(a, m), values(b, m));
    cell(table, row, "BF p " + to_string(m), printed, 3, r.p_value, tolerance,
         "F=" + fixed(r.statistic, 4));
  }

  StatsReport report;

 private:
  std::span<const CohortRow> rows_;
  const StatsOptions& opt_;
};

int translocations(const std::vector<CohortRow>& g) {
  return static_cast<int>(std::count_if(g.begin(), g.end(), [](const auto& r) {
    return r.scalar == metrics::ScalarLabel::kStSv;
  }));
}

int folds(const std::vector<CohortRow>& g) {
  return static_cast<int>(
      std::count_if(g.begin(), g.end(), [](const auto& r) { return r.fold; }));
}

RowFilter both(RowFilter a, RowFilter b) {
  return [a, b](const CohortRow& r) { return a(r) && b(r); };
}

void table_1b(Builder& b) {
  const auto tb = groups::study(Study::kTemporalBone);
  const auto c1 = b.rows(both(tb, tag(GroupTag::kC1)));
  const auto c2 = b.rows(both(tb, tag(GroupTag::kC2)));
  const auto c1wt = b.rows(both(tb, tag_wt(GroupTag::kC1)));
  const auto c2wt = b.rows(both(tb, tag_wt(GroupTag::kC2)));
  const auto cwt = b.rows(groups::control_wt(Study::kTemporalBone));
  const auto before = b.rows(both(tb, tag(GroupTag::kBeforePullback)));
  const auto exp = b.rows(groups::experimental(Study::kTemporalBone));
  if (c1.empty() && c2.empty() && exp.empty()) return;

  const std::string t = "1b";
  b.count(t, "C1", "translocations", 2, translocations(c1));
  b.count(t, "C1", "folded", 1, folds(c1));
  b.count(t, "C2", "translocations", 1, translocations(c2));
  b.count(t, "C2", "folded", 1, folds(c2));
  b.count(t, "Before pullback", "translocations", 0, translocations(before));
  b.count(t, "Exp", "translocations", 0, translocations(exp));

  struct Row {
    const char* name;
    const std::vector<CohortRow>* rows;
    double aid[2], mmd[2], amd[2];
  };
  const Row rows[] = {
      {"C1", &c1, {382, 84}, {0.38, 0.23}, {0.29, 0.25}},
      {"C2", &c2, {366, 82}, {0.44, 0.25}, {0.34, 0.26}},
      {"C1 WT", &c1wt, {428, 23}, {0.31, 0.15}, {0.21, 0.20}},
      {"C2 WT", &c2wt, {396, 41}, {0.34, 0.10}, {0.25, 0.14}},
      {"Before pullback", &before, {419, 27}, {0.34, 0.08}, {0.20, 0.08}},
      {"Exp", &exp, {410, 30}, {0.34, 0.07}, {0.15, 0.05}},
  };
  for (const Row& r : rows) {
    b.summary(t, r.name, *r.rows, Metric::kAid, r.aid[0], r.aid[1], 0);
    b.summary(t, r.name, *r.rows, Metric::kMmd, r.mmd[0], r.mmd[1], 2);
    b.summary(t, r.name, *r.rows, Metric::kAmd, r.amd[0], r.amd[1], 2);
  }

  struct Cmp {
    const char* name;
    const std::vector<CohortRow>* a;
    const std::vector<CohortRow>* b;
    double p[3];
  };
  const Cmp cmps[] = {
      {"Exp vs Control WT", &exp, &cwt, {0.5869, 0.2976, 0.6507}},
      {"Exp vs C1 WT", &exp, &c1wt, {0.1675, 0.0618, 0.6847}},
      {"C1 WT vs C2 WT", &c1wt, &c2wt, {0.2353, 0.1207, 0.3153}},
  };
  const Metric ms[] = {Metric::kAid, Metric::kMmd, Metric::kAmd};
  for (const Cmp& c : cmps) {
    for (int k = 0; k < 3; ++k) b.mwu(t, c.name, *c.a, *c.b, ms[k], c.p[k], 4, 0.02);
  }

  // Paired by specimen.
  std::map<std::string, const CohortRow*> after_by_id;
  for (const auto& r : exp) after_by_id[r.case_id] = &r;
  const double printed[] = {0.3151, 0.4757, 0.1152};
  for (int k = 0; k < 3; ++k) {
    std::vector<double> x, y;
    for (const auto& r : before) {
      const auto it = after_by_id.find(r.case_id);
      if (it == after_by_id.end()) continue;
      x.push_back(*r.value(ms[k]));
      y.push_back(*it->second->value(ms[k]));
    }
    const TestResult res = paired_t(x, y);
    b.cell(t, "Before Pullback vs Exp", "paired t p " + to_string(ms[k]),
           printed[k], 4, res.p_value, 0.02,
           "t=" + fixed(res.statistic, 4) + " n=" + std::to_string(res.n1));
  }
}

void table_2b(Builder& b) {
  const auto cl = groups::study(Study::kClinical);
  const auto all = b.rows(both(cl, [](const CohortRow& r) {
    return r.condition == Condition::kControl;
  }));
  const auto before = b.rows(both(cl, tag(GroupTag::kContBefore)));
  const auto after = b.rows(both(cl, tag(GroupTag::kContAfter)));
  const auto after_wt = b.rows(both(cl, tag_wt(GroupTag::kContAfter)));
  const auto cwt = b.rows(groups::control_wt(Study::kClinical));
  const auto exp = b.rows(groups::experimental(Study::kClinical));
  const auto exp_ok = b.rows(groups::experimental_depth_ok(Study::kClinical));
  if (all.empty() && exp.empty()) return;

  const std::string t = "2b";
  b.count(t, "Cont. All", "N", 28, static_cast<int>(all.size()));
  b.count(t, "Cont. Before", "N", 6, static_cast<int>(before.size()));
  b.count(t, "Cont. After", "N", 21, static_cast<int>(after.size()));
  b.count(t, "Cont. After WT", "N", 19, static_cast<int>(after_wt.size()));
  b.count(t, "Exp. All", "N", 7, static_cast<int>(exp.size()));
  b.count(t, "Exp. D<1.5", "N", 5, static_cast<int>(exp_ok.size()));
  b.count(t, "Cont. All", "translocations", 2, translocations(all));
  b.count(t, "Cont. Before", "translocations", 0, translocations(before));
  b.count(t, "Cont. After", "translocations", 2, translocations(after));
  b.count(t, "Exp. All", "translocations", 0, translocations(exp));
  b.count(t, "Exp. D<1.5", "translocations", 0, translocations(exp_ok));

  struct Row {
    const char* name;
    const std::vector<CohortRow>* rows;
    double aid[2], mmd[2], amd[2];
  };
  const Row rows[] = {
      {"Cont. All", &all, {392, 45}, {0.38, 0.15}, {0.27, 0.22}},
      {"Cont. Before", &before, {388, 31}, {0.36, 0.12}, {0.16, 0.05}},
      {"Cont. After", &after, {394, 49}, {0.38, 0.16}, {0.30, 0.24}},
      {"Cont. After WT", &after_wt, {400, 45}, {0.35, 0.14}, {0.27, 0.23}},
      {"Exp. All", &exp, {437, 48}, {0.33, 0.12}, {0.25, 0.15}},
      {"Exp. D<1.5", &exp_ok, {422, 23}, {0.26, 0.04}, {0.22, 0.05}},
  };
  for (const Row& r : rows) {
    b.summary(t, r.name, *r.rows, Metric::kAid, r.aid[0], r.aid[1], 0);
    b.summary(t, r.name, *r.rows, Metric::kMmd, r.mmd[0], r.mmd[1], 2);
    b.summary(t, r.name, *r.rows, Metric::kAmd, r.amd[0], r.amd[1], 2);
  }

  struct Cnc {
    const char* name;
    const std::vector<CohortRow>* rows;
    Metric metric;
    double mean, sd;
    int n;
  };
  const Cnc cnc[] = {
      {"Cont. All", &all, Metric::kCncImplantOnly, 54.3, 18.76, 12},
      {"Cont. All", &all, Metric::kCncBimodal, 81.0, 8.06, 4},
      {"Cont. Before", &before, Metric::kCncImplantOnly, 50.0, 19.60, 2},
      {"Cont. After", &after, Metric::kCncImplantOnly, 55.3, 19.28, 9},
      {"Cont. After", &after, Metric::kCncBimodal, 81.0, 8.06, 4},
      {"Exp. All", &exp, Metric::kCncImplantOnly, 70.0, 24.49, 5},
      {"Exp. All", &exp, Metric::kCncBimodal, 84.5, 3.84, 4},
      {"Exp. D<1.5", &exp_ok, Metric::kCncImplantOnly, 82.0, 5.48, 4},
  };
  for (const Cnc& c : cnc) {
    const auto v = values(*c.rows, c.metric);
    b.count(t, c.name, to_string(c.metric) + " N", c.n,
            static_cast<int>(v.size()));
    if (v.empty()) continue;
    const GroupSummary s = summarize(v);
    const std::string col = to_string(c.metric);
    b.cell(t, c.name, col + " mean", c.mean, 1, s.mean, rounding_tolerance(1));
    b.cell(t, c.name, col + " sd", c.sd, 2, s.sd_population,
           rounding_tolerance(2));
  }

  struct Cmp {
    const char* name;
    const std::vector<CohortRow>* a;
    const std::vector<CohortRow>* b;
    double p[3];
  };
  const Cmp cmps[] = {
      {"Cont. WT vs Exp. All", &cwt, &exp, {0.0820, 0.5522, 0.6919}},
      {"Before vs Exp. All", &before, &exp, {0.0633, 0.4751, 0.3173}},
      {"Before vs After WT", &before, &after_wt, {0.2794, 0.7746, 0.6332}},
  };
  const Metric ms[] = {Metric::kAid, Metric::kMmd, Metric::kAmd};
  for (const Cmp& c : cmps) {
    for (int k = 0; k < 3; ++k) b.mwu(t, c.name, *c.a, *c.b, ms[k], c.p[k], 4, 0.02);
  }
}

void table_3(Builder& b) {
  const auto cwt = b.rows(groups::pooled_control_wt());
  const auto exp = b.rows(groups::pooled_experimental());
  const auto exp_ok = b.rows(groups::pooled_experimental_depth_ok());
  const std::string t = "3";
  b.count("groups", "Control WT (pooled)", "N", 37, static_cast<int>(cwt.size()));
  b.count("groups", "Exp. All (pooled)", "N", 14, static_cast<int>(exp.size()));
  b.count("groups", "Exp. D<1.5 (pooled)", "N", 11,
          static_cast<int>(exp_ok.size()));
  if (cwt.empty() || exp.empty() || exp_ok.empty()) return;

  b.summary(t, "Control WT", cwt, Metric::kAid, 401, 41, 0);
  b.summary(t, "Control WT", cwt, Metric::kMmd, 0.34, 0.13, 2);
  b.summary(t, "Control WT", cwt, Metric::kAmd, 0.23, 0.19, 2);
  b.summary(t, "Exp. All", exp, Metric::kAid, 424, 43, 0);
  b.summary(t, "Exp. All", exp, Metric::kMmd, 0.34, 0.09, 2);
  b.summary(t, "Exp. All", exp, Metric::kAmd, 0.20, 0.12, 2);
  b.summary(t, "Exp. D<1.5", exp_ok, Metric::kAid, 432, 19, 0);
  b.summary(t, "Exp. D<1.5", exp_ok, Metric::kMmd, 0.30, 0.07, 2);
  b.summary(t, "Exp. D<1.5", exp_ok, Metric::kAmd, 0.18, 0.06, 2);

  const Metric ms[] = {Metric::kAid, Metric::kMmd, Metric::kAmd};
  const double mwu_all[] = {0.184, 0.792, 0.933};
  const double mwu_ok[] = {0.141, 0.315, 0.932};
  const double bf_all[] = {0.610, 0.181, 0.352};
  const double bf_ok[] = {0.051, 0.039, 0.165};
  for (int k = 0; k < 3; ++k) {
    b.mwu(t, "Control WT vs Exp. All", cwt, exp, ms[k], mwu_all[k], 3, 0.02);
  }
  for (int k = 0; k < 3; ++k) {
    b.mwu(t, "Control WT vs Exp. D<1.5", cwt, exp_ok, ms[k], mwu_ok[k], 3, 0.02);
  }
  for (int k = 0; k < 3; ++k) {
    b.bf(t, "Control WT vs Exp. All", cwt, exp, ms[k], bf_all[k], 0.02);
  }
  for (int k = 0; k < 3; ++k) {
    // The two headline cells carry the tighter tolerance.
    const double tol = ms[k] == Metric::kAmd ? 0.02 : 0.01;
    b.bf(t, "Control WT vs Exp. D<1.5", cwt, exp_ok, ms[k], bf_ok[k], tol);
  }
}

void figure_3(Builder& b, std::span<const CohortRow> rows) {
  const Fig3Data d = fig3_data(rows);
  if (d.cnc.empty()) return;
  b.count("fig3", "implant-only CNC", "N", 17, static_cast<int>(d.cnc.size()));
  if (d.cnc.size() < 3) return;
  struct Panel {
    const char* name;
    const std::vector<double>* x;
    double r, p, p_tol;
  };
  const Panel panels[] = {
      {"|AID error| vs CNC", &d.aid_error_abs, -0.53, 0.03, 0.005},
      {"MMD vs CNC", &d.mmd, -0.37, 0.14, 0.01},
      {"AMD vs CNC", &d.amd, -0.34, 0.19, 0.01},
  };
  for (const Panel& p : panels) {
    const Correlation c = pearson(*p.x, d.cnc);
    const OlsFit fit = ols_with_ci(*p.x, d.cnc);
    const std::string n = "n=" + std::to_string(c.n);
    b.cell("fig3", p.name, "r", p.r, 2, c.r, 0.01,
           n + " slope=" + fixed(fit.slope, 4));
    b.cell("fig3", p.name, "p", p.p, 2, c.p_value, p.p_tol, n);
  }
}

void power(Builder& b, const StatsOptions& opt) {
  struct Case {
    const char* metric;
    double ma, sa, mb, sb;
    double printed, tol;
  };
  // Moments as printed in Table 3: Control WT vs Exp. D<1.5.
  const Case cases[] = {
      {"AID", 401, 41, 432, 19, 14, 2},
      {"MMD", 0.34, 0.13, 0.30, 0.07, 66, 8},
      {"AMD", 0.23, 0.19, 0.18, 0.06, 81, 10},
  };
  for (const Case& c : cases) {
    const PowerResult r = power_analysis(c.ma, c.sa, c.mb, c.sb, opt.power);
    const double n = r.required_n ? *r.required_n
                                  : std::numeric_limits<double>::quiet_NaN();
    std::string detail = "mode=" + to_string(r.mode) +
                         " power=" + fixed(r.achieved_power, 4);
    if (!r.required_n) {
      detail += " unreachable for n<=" + std::to_string(opt.power.max_n);
    }
    b.cell("power", std::string("Control WT vs Exp. D<1.5 ") + c.metric,
           "required n", c.printed, 0, n, c.tol, detail);
  }
}

}  // namespace

int StatsReport::failures() const {
  return static_cast<int>(std::count_if(
      cells.begin(), cells.end(), [](const ReportCell& c) { return !c.pass; }));
}

std::vector<ReportCell> StatsReport::table(const std::string& name) const {
  std::vector<ReportCell> out;
  for (const auto& c : cells) {
    if (c.table == name) out.push_back(c);
  }
  return out;
}

double rounding_tolerance(int decimals) {
  return 0.5 * std::pow(10.0, -decimals) + 1e-9;
}

Fig3Data fig3_data(std::span<const CohortRow> rows) {
  Fig3Data d;
  for (const auto& r : rows) {
    if (r.study != Study::kClinical || !r.cnc_implant_only_pct) continue;
    d.aid_error_abs.push_back(std::abs(r.aid_deg - metrics::kIdealAidDeg));
    d.mmd.push_back(r.mmd_mm);
    d.amd.push_back(r.amd_mm);
    d.cnc.push_back(*r.cnc_implant_only_pct);
  }
  return d;
}

StatsReport reproduce_tables(std::span<const CohortRow> rows,
                             const StatsOptions& options) {
  if (rows.empty()) throw Error(ErrorKind::kEmptyGroup, "no cohort rows");
  Builder b(rows, options);
  table_1b(b);
  table_2b(b);
  table_3(b);
  figure_3(b, rows);
  if (options.include_power) power(b, options);
  return std::move(b.report);
}

void write_report_text(std::ostream& out, const StatsReport& report) {
  std::string current;
  for (const auto& c : report.cells) {
    if (c.table != current) {
      current = c.table;
      out << "\n[" << (current == "groups" || current == "power" ||
                               current == "fig3"
                           ? current
                           : "table " + current)
          << "]\n";
    }
    const int shown = c.decimals + (c.table == "fig3" ? 2 : 0);
    char line[512];
    std::snprintf(line, sizeof line, "%-4s %-26s %-26s printed %-9s computed %-10s tol %-7s %s",
                  c.pass ? "PASS" : "FAIL", c.row.c_str(), c.column.c_str(),
                  fixed(c.printed, c.decimals).c_str(),
                  fixed(c.computed, shown + 1).c_str(),
                  fixed(c.tolerance, c.tolerance < 0.01 ? 4 : 2).c_str(),
                  c.detail.c_str());
    out << line << '\n';
  }
  out << "\ncells " << report.cells.size() << ", pass "
      << report.cells.size() - static_cast<size_t>(report.failures())
      << ", fail " << report.failures() << '\n';
}

void write_report_csv(std::ostream& out, const StatsReport& report) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  };
  out << "table,row,column,printed,computed,tolerance,status,detail\n";
  for (const auto& c : report.cells) {
    char num[128];
    std::snprintf(num, sizeof num, "%.*f,%.10g,%.10g", c.decimals, c.printed,
                  c.computed, c.tolerance);
    out << c.table << ',' << quote(c.row) << ',' << quote(c.column) << ','
        << num << ',' << (c.pass ? "PASS" : "FAIL") << ',' << quote(c.detail)
        << '\n';
  }
}

void write_regression_csv(std::ostream& out, const Fig3Data& data,
                          int samples) {
  out << "panel,x,fit,lower,upper\n";
  const std::pair<const char*, const std::vector<double>*> panels[] = {
      {"aid_error_abs", &data.aid_error_abs},
      {"mmd", &data.mmd},
      {"amd", &data.amd},
  };
  for (const auto& [name, x] : panels) {
    const OlsFit fit = ols_with_ci(*x, data.cnc);
    for (const BandPoint& p : fit.band(samples)) {
      char line[160];
      std::snprintf(line, sizeof line, "%s,%.6f,%.6f,%.6f,%.6f\n", name, p.x,
                    p.fit, p.lower, p.upper);
      out << line;
    }
  }
}

}  // namespace ciplan::stats
