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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ciplan/stats/hypothesis.hpp"

namespace ciplan::stats {

enum class PowerMode {
  kEqualGroups,   // control n = experimental n
  kFixedControl,  // control n held at PowerOptions::control_n
};
std::string to_string(PowerMode m);
PowerMode parse_power_mode(const std::string& text);

struct PowerOptions {
  PowerMode mode = PowerMode::kFixedControl;
  int control_n = 37;
  double alpha = 0.05;
  double target_power = 0.80;
  int replicates = 20000;
  std::uint64_t seed = 0;
  int max_n = 10000;
  MwuVariant variant = MwuVariant::kNormal;
  int threads = 0;  // 0: hardware concurrency
};

struct PowerResult {
  std::optional<int> required_n;  // experimental group size; empty if unreachable
  double achieved_power = 0.0;    // at required_n, or at max_n when unreachable
  PowerMode mode = PowerMode::kFixedControl;
  std::vector<std::pair<int, double>> curve;  // every (n, power) evaluated
};

// Monte-Carlo power of the two-sided Mann-Whitney test for normal samples
// with the given moments (a: control, b: experimental). Replicate r draws
// its samples from streams derived from (seed, r); growing n extends the
// same streams, so power estimates at different n share random numbers.
double mwu_power(double mean_a, double sd_a, double mean_b, double sd_b,
                 int n_a, int n_b, const PowerOptions& options);

// Smallest experimental n in [2, max_n] whose power reaches the target,
// found by doubling then bisection after a reachability check at max_n.
PowerResult power_analysis(double mean_a, double sd_a, double mean_b,
                           double sd_b, const PowerOptions& options = {});

}  // namespace ciplan::stats
