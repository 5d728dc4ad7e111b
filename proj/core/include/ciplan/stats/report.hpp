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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ciplan/stats/cohort.hpp"
#include "ciplan/stats/hypothesis.hpp"
#include "ciplan/stats/power.hpp"

namespace ciplan::stats {

// One printed number next to its recomputation.
struct ReportCell {
  std::string table;   // "1b", "2b", "3", "fig3", "power", "groups"
  std::string row;
  std::string column;
  double printed = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  int decimals = 0;     // display precision of the printed value
  bool pass = false;
  std::string detail;   // alternative variants, sizes
};

struct StatsOptions {
  // Variant used for the diff; the other variants are listed in `detail`.
  MwuVariant mwu_variant = MwuVariant::kNormal;
  bool include_power = true;
  PowerOptions power;
};

struct StatsReport {
  std::vector<ReportCell> cells;
  int failures() const;
  std::vector<ReportCell> table(const std::string& name) const;
};

// Recomputes Tables 1(b), 2(b), 3, the Figure 3 correlations and the
// power analysis from the per-case rows, diffing each against the printed
// value. "Exact after rounding" means within half a unit of the printed
// last digit.
StatsReport reproduce_tables(std::span<const CohortRow> rows,
                             const StatsOptions& options = {});

// Half a unit in the last printed digit.
double rounding_tolerance(int decimals);

void write_report_text(std::ostream& out, const StatsReport& report);
void write_report_csv(std::ostream& out, const StatsReport& report);

// Figure 3 inputs: the clinical ears with an implant-only CNC score.
struct Fig3Data {
  std::vector<double> aid_error_abs;  // |AID - 450|
  std::vector<double> mmd;
  std::vector<double> amd;
  std::vector<double> cnc;
};
Fig3Data fig3_data(std::span<const CohortRow> rows);

// Regression series (x, fit, lower, upper) for the three panels as CSV.
void write_regression_csv(std::ostream& out, const Fig3Data& data,
                          int samples = 50);

}  // namespace ciplan::stats
