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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ciplan::stats {

// Mean and population standard deviation (N denominator).
struct GroupSummary {
  int n = 0;
  double mean = 0.0;
  double sd_population = 0.0;
};
GroupSummary summarize(std::span<const double> sample);

struct TestResult {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 1.0;  // two-sided
  int n1 = 0;
  int n2 = 0;
  std::string method_variant;
  bool degenerate = false;
};

enum class MwuVariant {
  kAuto,               // exact when n1*n2 <= 400 and no ties, else kNormalCc
  kExact,
  kNormalCc,           // tie-corrected normal with continuity correction
  kNormal,             // tie-corrected normal, no continuity correction
};
std::string to_string(MwuVariant v);

// Statistic is U of sample_a: the number of (a, b) pairs with a > b, ties
// counted one half.
TestResult mann_whitney_u(std::span<const double> sample_a,
                          std::span<const double> sample_b,
                          MwuVariant variant = MwuVariant::kAuto);

// Exact null distribution of U for sizes (n1, n2) without ties:
// pmf[u] for u = 0 .. n1*n2.
std::vector<double> mann_whitney_exact_pmf(int n1, int n2);

// Two-sided paired t on after - before, df = n - 1.
TestResult paired_t(std::span<const double> before,
                    std::span<const double> after);

// Levene statistic on absolute deviations from group medians, F(1, N-2).
TestResult brown_forsythe(std::span<const double> sample_a,
                          std::span<const double> sample_b);

// One-sample KS against a normal with the sample mean and SD; the
// Lilliefors p-value comes from `replicates` seeded normal samples.
TestResult ks_normality(std::span<const double> sample, std::uint64_t seed = 0,
                        int replicates = 2000);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
  int n = 0;
};
Correlation pearson(std::span<const double> x, std::span<const double> y);

struct BandPoint {
  double x = 0.0;
  double fit = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n = 0;
  double level = 0.95;
  double residual_se = 0.0;
  double mean_x = 0.0;
  double sxx = 0.0;
  double t_quantile = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;

  // Pointwise confidence interval of the mean response.
  BandPoint at(double x) const;
  // `count` evenly spaced samples over [x_min, x_max].
  std::vector<BandPoint> band(int count = 50) const;
};
OlsFit ols_with_ci(std::span<const double> x, std::span<const double> y,
                   double level = 0.95);

}  // namespace ciplan::stats
