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

#include <cmath>
#include <numeric>
#include <set>

#include "ciplan/error.hpp"
#include "ciplan/random.hpp"
#include "ciplan/stats/cohort.hpp"
#include "ciplan/stats/csv.hpp"
#include "ciplan/stats/hypothesis.hpp"
#include "ciplan/stats/power.hpp"
#include "ciplan/stats/report.hpp"

using namespace ciplan;
using namespace ciplan::stats;

namespace {

// Fixed samples; reference values below come from scipy.stats
// (mannwhitneyu, levene(center="median"), ttest_rel, pearsonr, linregress).
const std::vector<double> kA{3.1, 4.7, 2.2, 5.9, 4.4, 3.8, 6.1};
const std::vector<double> kB{5.2, 6.8, 4.9, 7.7, 6.0, 5.5, 8.1, 6.6};
const std::vector<double> kTiesA{1, 2, 2, 3, 4, 4, 4, 5};
const std::vector<double> kTiesB{2, 3, 3, 5, 6, 6, 7};
const std::vector<double> kX{1.0, 2.5, 3.1, 4.8, 5.2, 6.9, 7.3, 8.8, 9.1, 10.4};
const std::vector<double> kY{2.1, 2.9, 4.4, 4.1, 6.3, 6.0, 8.2, 7.7, 9.9, 10.1};

template <typename F>
void expect_kind(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

// Null distribution of U by enumerating every rank subset of size n1.
std::vector<double> brute_pmf(int n1, int n2) {
  const int n = n1 + n2;
  std::vector<double> counts(static_cast<size_t>(n1 * n2 + 1), 0.0);
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != n1) continue;
    int rank_sum = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) rank_sum += i + 1;
    }
    counts[static_cast<size_t>(rank_sum - n1 * (n1 + 1) / 2)] += 1.0;
    total += 1.0;
  }
  for (double& c : counts) c /= total;
  return counts;
}

std::string cohort_dir() { return CIPLAN_SOURCE_DIR "/data"; }

}  // namespace

TEST(Summary, PopulationStandardDeviation) {
  const GroupSummary s = summarize(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_EQ(s.n, 8);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_DOUBLE_EQ(s.sd_population, 2.0);
  expect_kind(ErrorKind::kEmptyGroup, [] { (void)summarize(std::vector<double>{}); });
}

TEST(MannWhitney, StatisticCountsPairs) {
  const TestResult r = mann_whitney_u(kA, kB, MwuVariant::kNormal);
  double u = 0.0;
  for (double a : kA) {
    for (double b : kB) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  EXPECT_DOUBLE_EQ(r.statistic, u);
  EXPECT_DOUBLE_EQ(r.statistic, 7.0);
}

TEST(MannWhitney, VariantsMatchScipy) {
  EXPECT_NEAR(mann_whitney_u(kA, kB, MwuVariant::kExact).p_value, 0.013986013986013986, 1e-12);
  EXPECT_NEAR(mann_whitney_u(kA, kB, MwuVariant::kNormalCc).p_value, 0.01767227638672243, 1e-9);
  EXPECT_NEAR(mann_whitney_u(kA, kB, MwuVariant::kNormal).p_value, 0.015087255494406496, 1e-9);
  const TestResult auto_r = mann_whitney_u(kA, kB, MwuVariant::kAuto);
  EXPECT_NEAR(auto_r.p_value, 0.013986013986013986, 1e-12);  // small, no ties
}

TEST(MannWhitney, TieCorrectionMatchesScipy) {
  EXPECT_DOUBLE_EQ(mann_whitney_u(kTiesA, kTiesB, MwuVariant::kNormal).statistic, 15.5);
  EXPECT_NEAR(mann_whitney_u(kTiesA, kTiesB, MwuVariant::kNormalCc).p_value, 0.15959894244264883, 1e-9);
  EXPECT_NEAR(mann_whitney_u(kTiesA, kTiesB, MwuVariant::kNormal).p_value, 0.1429147527878653, 1e-9);
  expect_kind(ErrorKind::kParameter,
              [] { (void)mann_whitney_u(kTiesA, kTiesB, MwuVariant::kExact); });
}

TEST(MannWhitney, ExactPmfMatchesEnumeration) {
  for (auto [n1, n2] : std::vector<std::pair<int, int>>{{1, 1}, {2, 3}, {4, 5}, {6, 6}, {3, 9}}) {
    const auto got = mann_whitney_exact_pmf(n1, n2);
    const auto want = brute_pmf(n1, n2);
    ASSERT_EQ(got.size(), want.size());
    for (size_t u = 0; u < got.size(); ++u) EXPECT_NEAR(got[u], want[u], 1e-14) << n1 << "," << n2;
  }
}

TEST(MannWhitney, InvariantUnderMonotoneTransform) {
  std::vector<double> ea, eb;
  for (double v : kA) ea.push_back(std::exp(v) + 3.0);
  for (double v : kB) eb.push_back(std::exp(v) + 3.0);
  for (auto variant : {MwuVariant::kExact, MwuVariant::kNormal, MwuVariant::kNormalCc}) {
    EXPECT_DOUBLE_EQ(mann_whitney_u(ea, eb, variant).p_value,
                     mann_whitney_u(kA, kB, variant).p_value);
  }
}

TEST(MannWhitney, SwappingSamplesMirrorsU) {
  const auto ab = mann_whitney_u(kA, kB, MwuVariant::kNormal);
  const auto ba = mann_whitney_u(kB, kA, MwuVariant::kNormal);
  EXPECT_DOUBLE_EQ(ab.statistic + ba.statistic, double(kA.size() * kB.size()));
  EXPECT_NEAR(ab.p_value, ba.p_value, 1e-15);
}

TEST(MannWhitney, EmptyGroupRejected) {
  expect_kind(ErrorKind::kEmptyGroup, [] { (void)mann_whitney_u(std::vector<double>{}, kB); });
}

TEST(BrownForsythe, MatchesScipyLeveneMedian) {
  const TestResult r = brown_forsythe(kA, kB);
  EXPECT_NEAR(r.statistic, 0.14681683090880718, 1e-9);
  EXPECT_NEAR(r.p_value, 0.7077884515684727, 1e-9);
}

TEST(PairedT, MatchesScipy) {
  const std::vector<double> before{410, 395, 430, 402, 441, 388, 420};
  const std::vector<double> after{405, 420, 436, 399, 455, 401, 431};
  const TestResult r = paired_t(before, after);
  EXPECT_NEAR(r.statistic, 2.2161070967623115, 1e-9);
  EXPECT_NEAR(r.p_value, 0.06856435368230869, 1e-9);
  expect_kind(ErrorKind::kLengthMismatch, [&] {
    (void)paired_t(before, std::vector<double>{1, 2});
  });
  const TestResult flat = paired_t(before, before);
  EXPECT_TRUE(flat.degenerate);
  EXPECT_EQ(flat.p_value, 1.0);
}

TEST(Pearson, MatchesScipyAndIsAffineInvariant) {
  const Correlation c = pearson(kX, kY);
  EXPECT_NEAR(c.r, 0.9566874482275547, 1e-12);
  EXPECT_NEAR(c.p_value, 1.4610992960756556e-05, 1e-10);
  std::vector<double> x2, y2;
  for (double v : kX) x2.push_back(3.0 * v - 7.0);
  for (double v : kY) y2.push_back(-0.5 * v + 2.0);
  const Correlation d = pearson(x2, y2);
  EXPECT_NEAR(d.r, -c.r, 1e-12);
  EXPECT_NEAR(d.p_value, c.p_value, 1e-10);
}

TEST(Ols, BandMatchesTQuantileFormula) {
  const OlsFit f = ols_with_ci(kX, kY);
  EXPECT_NEAR(f.slope, 0.8616058595591533, 1e-12);
  EXPECT_NEAR(f.intercept, 1.077909370005404, 1e-12);
  const std::vector<std::array<double, 3>> want{
      {1.0, 0.7152055244171414, 3.163824934711973},
      {5.0, 4.726227610459206, 6.045649725143135},
      {10.4, 8.890332794193354, 11.186887824647842}};
  for (const auto& [x, lo, hi] : want) {
    const BandPoint p = f.at(x);
    EXPECT_NEAR(p.lower, lo, 1e-9);
    EXPECT_NEAR(p.upper, hi, 1e-9);
  }
  const auto band = f.band(11);
  ASSERT_EQ(band.size(), 11u);
  EXPECT_DOUBLE_EQ(band.front().x, 1.0);
  EXPECT_DOUBLE_EQ(band.back().x, 10.4);
}

TEST(Ols, ExactLineHasZeroWidthBand) {
  std::vector<double> y;
  for (double v : kX) y.push_back(2.0 * v + 1.0);
  const OlsFit f = ols_with_ci(kX, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  const BandPoint p = f.at(4.0);
  EXPECT_NEAR(p.fit, 9.0, 1e-12);
  EXPECT_NEAR(p.upper - p.lower, 0.0, 1e-9);
}

TEST(KsNormality, StatisticMatchesLillieforsReference) {
  // statsmodels lilliefors: D = 0.0945636, table p = 0.969.
  const std::vector<double> z{0.12, -0.53, 1.21, 0.33, -1.05, 0.78, -0.22, 0.05,
                              1.6,  -0.9,  0.41, -0.35, 0.67, -1.4, 0.2};
  const TestResult r = ks_normality(z, 1, 4000);
  EXPECT_NEAR(r.statistic, 0.09456362444076843, 1e-9);
  EXPECT_GT(r.p_value, 0.9);
}

TEST(KsNormality, RejectsExponentialSample) {
  const std::vector<double> e{1.073029, 0.308453, 5.375437, 0.366427, 0.115362, 1.799797,
                              0.498639, 0.551421, 0.029713, 0.764067, 1.041458, 0.230602,
                              1.677215, 0.208617, 0.786256, 0.128761, 0.922904, 0.462364,
                              0.68874,  2.649024, 1.114514, 0.898784, 2.839968, 2.030853,
                              1.165838, 0.328609, 1.434708, 0.157755, 8.42293,  0.235942,
                              2.478126, 1.902251, 0.319917, 1.801245, 0.047815, 1.355675,
                              1.196603, 0.059227, 1.103689, 3.756093};
  const TestResult r = ks_normality(e, 2, 2000);
  EXPECT_NEAR(r.statistic, 0.21218929130069275, 1e-6);  // sample printed to 6 dp
  EXPECT_LT(r.p_value, 0.002);
}

TEST(KsNormality, NullPValuesAreRoughlyUniform) {
  // Simulation oracle: under normality the rejection rate tracks alpha.
  std::mt19937_64 rng(77);
  int reject = 0;
  constexpr int kTrials = 200;
  for (int t = 0; t < kTrials; ++t) {
    std::vector<double> s(20);
    for (double& v : s) v = 10.0 + 3.0 * standard_normal(rng);
    reject += ks_normality(s, 1000 + t, 400).p_value < 0.10;
  }
  EXPECT_NEAR(reject / double(kTrials), 0.10, 0.06);
}

TEST(KsNormality, ConstantSampleIsDegenerate) {
  const TestResult r = ks_normality(std::vector<double>{1, 1, 1, 1, 1});
  EXPECT_TRUE(r.degenerate);
}

TEST(Power, IdenticalDistributionsGiveAlpha) {
  PowerOptions o;
  o.replicates = 4000;
  o.mode = PowerMode::kEqualGroups;
  const double p = mwu_power(0.0, 1.0, 0.0, 1.0, 20, 20, o);
  EXPECT_NEAR(p, 0.05, 0.015);
}

TEST(Power, MonotoneInSampleSize) {
  PowerOptions o;
  o.replicates = 4000;
  double prev = 0.0;
  for (int n : {5, 10, 20, 40, 80}) {
    const double p = mwu_power(401, 41, 432, 19, 37, n, o);
    EXPECT_GE(p, prev - 0.005) << n;
    prev = p;
  }
  EXPECT_GT(prev, 0.8);
}

TEST(Power, RequiredNReachesTarget) {
  PowerOptions o;
  o.replicates = 4000;
  o.mode = PowerMode::kEqualGroups;
  o.max_n = 200;
  const PowerResult r = power_analysis(0.0, 1.0, 1.0, 1.0, o);
  ASSERT_TRUE(r.required_n.has_value());
  EXPECT_GE(r.achieved_power, 0.8);
  // Normal-theory two-sample size for d = 1 is about 17 per group.
  EXPECT_NEAR(*r.required_n, 17, 3);
  // The n just below is underpowered on the same random numbers.
  EXPECT_LT(mwu_power(0.0, 1.0, 1.0, 1.0, *r.required_n - 1, *r.required_n - 1, o), 0.8);
}

TEST(Power, UnreachableTargetReportsEmpty) {
  PowerOptions o;
  o.replicates = 500;
  o.max_n = 50;
  const PowerResult r = power_analysis(0.0, 1.0, 0.01, 1.0, o);
  EXPECT_FALSE(r.required_n.has_value());
  EXPECT_LT(r.achieved_power, 0.8);
}

TEST(Power, ModeNamesRoundTrip) {
  for (auto m : {PowerMode::kEqualGroups, PowerMode::kFixedControl}) {
    EXPECT_EQ(parse_power_mode(to_string(m)), m);
  }
  EXPECT_THROW((void)parse_power_mode("bogus"), Error);
}

TEST(Csv, QuotesAndEmptyCells) {
  const CsvTable t = parse_csv("a,b,c\n1,\"x, y\",\n\"q\"\"q\",2,3\n", "t.csv");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "x, y");
  EXPECT_EQ(t.rows[0][2], "");
  EXPECT_EQ(t.rows[1][0], "q\"q");
  EXPECT_EQ(t.column("c"), 2);
  EXPECT_EQ(t.column("z"), -1);
  EXPECT_EQ(t.line_numbers[1], 3);
}

TEST(Csv, FieldCountErrorNamesTheLine) {
  try {
    (void)parse_csv("a,b\n1,2\n3\n", "bad.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
  }
}

TEST(Cohort, ShippedFilesLoadWithDocumentedCounts) {
  const auto rows = ingest_cohort(cohort_dir());
  const auto tb = select(rows, groups::study(Study::kTemporalBone));
  const auto cl = select(rows, groups::study(Study::kClinical));
  EXPECT_EQ(tb.size(), 28u);
  EXPECT_EQ(cl.size(), 35u);
  for (auto g : {GroupTag::kC1, GroupTag::kC2, GroupTag::kBeforePullback, GroupTag::kExp}) {
    EXPECT_EQ(select(tb, groups::tag(g)).size(), 7u) << to_string(g);
  }
  std::set<std::string> specimens;
  for (const auto& r : tb) specimens.insert(r.case_id);
  EXPECT_EQ(specimens.size(), 21u);
  EXPECT_EQ(select(cl, [](const CohortRow& r) { return r.condition == Condition::kControl; }).size(), 28u);
  EXPECT_EQ(select(cl, [](const CohortRow& r) { return r.cnc_implant_only_pct.has_value(); }).size(), 17u);
  EXPECT_EQ(select(rows, groups::pooled_control_wt()).size(), 37u);
  EXPECT_EQ(select(rows, groups::pooled_experimental()).size(), 14u);
  EXPECT_EQ(select(rows, groups::pooled_experimental_depth_ok()).size(), 11u);
}

TEST(Cohort, BadRowsReportFileLineAndColumn) {
  const std::string header = "specimen,condition,group,d_mm,scalar,fold,aid_deg,mmd_mm,amd_mm\n";
  struct Case {
    std::string row;
    std::string column;
  };
  const std::vector<Case> cases{
      {"1,CONTROL,C1,,ST,N,abc,0.2,0.1\n", "aid_deg"},
      {"1,CONTROL,XX,,ST,N,400,0.2,0.1\n", "group"},
      {"1,CONTROL,C1,0.5,ST,N,400,0.2,0.1\n", "d_mm"},
      {"1,CONTROL,C1,,ST,maybe,400,0.2,0.1\n", "fold"},
  };
  for (const auto& c : cases) {
    try {
      (void)parse_temporal_bone(header + "2,CONTROL,C1,,ST,N,400,0.2,0.1\n" + c.row, "tb.csv");
      FAIL() << c.row;
    } catch (const Error& e) {
      const std::string msg = e.what();
      EXPECT_EQ(e.kind(), ErrorKind::kParse) << msg;
      EXPECT_NE(msg.find("tb.csv:3"), std::string::npos) << msg;
      EXPECT_NE(msg.find(c.column), std::string::npos) << msg;
    }
  }
  EXPECT_THROW((void)parse_temporal_bone("specimen,condition\n1,CONTROL\n", "tb.csv"), Error);
}

TEST(Cohort, ClinicalCncOutOfRangeRejected) {
  const auto table = read_csv(cohort_dir() + "/clinical.csv");
  std::string csv;
  for (size_t i = 0; i < table.header.size(); ++i) csv += (i ? "," : "") + table.header[i];
  csv += "\n";
  auto row = table.rows.front();
  row[static_cast<size_t>(table.column("cnc_implant_only_pct"))] = "140";
  for (size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + row[i];
  csv += "\n";
  EXPECT_THROW((void)parse_clinical(csv, "c.csv"), Error);
}

TEST(Report, TablesRecomputeFromShippedRows) {
  const auto rows = ingest_cohort(cohort_dir());
  StatsOptions o;
  o.include_power = false;
  const StatsReport r = reproduce_tables(rows, o);
  EXPECT_FALSE(r.table("1b").empty());
  EXPECT_FALSE(r.table("2b").empty());
  EXPECT_FALSE(r.table("3").empty());
  EXPECT_FALSE(r.table("fig3").empty());
  for (const auto& c : r.cells) {
    EXPECT_EQ(c.pass, std::abs(c.computed - c.printed) <= c.tolerance)
        << c.table << " " << c.row << " " << c.column;
  }
}

TEST(Report, RoundingTolerance) {
  EXPECT_NEAR(rounding_tolerance(0), 0.5, 1e-8);
  EXPECT_NEAR(rounding_tolerance(2), 0.005, 1e-8);
}
