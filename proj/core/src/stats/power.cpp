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

#include "ciplan/stats/power.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <random>
#include <thread>

#include "ciplan/error.hpp"
#include "ciplan/random.hpp"

namespace ciplan::stats {
namespace {

void validate(double sd_a, double sd_b, const PowerOptions& o) {
  if (!(sd_a > 0.0) || !(sd_b > 0.0)) {
    throw Error(ErrorKind::kParameter, "power analysis needs positive SDs");
  }
  if (!(o.alpha > 0.0 && o.alpha < 1.0) ||
      !(o.target_power > 0.0 && o.target_power < 1.0)) {
    throw Error(ErrorKind::kParameter, "alpha and target power must be in (0, 1)");
  }
  if (o.replicates < 1 || o.max_n < 2 ||
      (o.mode == PowerMode::kFixedControl && o.control_n < 1)) {
    throw Error(ErrorKind::kParameter, "invalid power-analysis sizes");
  }
}

// Rejection rule for untied samples of sizes (n_a, n_b) as a function of U.
class Rejector {
 public:
  Rejector(int n_a, int n_b, double alpha, MwuVariant variant)
      : n_a_(n_a), n_b_(n_b), alpha_(alpha) {
    const double prod = static_cast<double>(n_a) * n_b;
    if (variant == MwuVariant::kAuto) {
      variant = prod <= 400.0 ? MwuVariant::kExact : MwuVariant::kNormalCc;
    }
    variant_ = variant;
    if (variant_ == MwuVariant::kExact) {
      if (prod > 250000.0) {
        throw Error(ErrorKind::kParameter,
                    "exact Mann-Whitney power limited to n_a*n_b <= 250000");
      }
      const auto pmf = mann_whitney_exact_pmf(n_a, n_b);
      lower_.resize(pmf.size());
      double acc = 0.0;
      for (size_t i = 0; i < pmf.size(); ++i) lower_[i] = acc += pmf[i];
    }
  }

  // u counts pairs with a > b; untied data gives integral u.
  bool reject(double u) const {
    const double n1 = n_a_;
    const double n2 = n_b_;
    if (variant_ == MwuVariant::kExact) {
      const auto k = static_cast<size_t>(std::llround(u));
      const double lo = lower_[k];
      const double hi = 1.0 - (k == 0 ? 0.0 : lower_[k - 1]);
      return std::min(1.0, 2.0 * std::min(lo, hi)) < alpha_;
    }
    double dev = std::abs(u - n1 * n2 / 2.0);
    if (variant_ == MwuVariant::kNormalCc) dev = std::max(0.0, dev - 0.5);
    const double z = dev / std::sqrt(n1 * n2 * (n1 + n2 + 1.0) / 12.0);
    return std::erfc(z / std::sqrt(2.0)) < alpha_;
  }

 private:
  int n_a_;
  int n_b_;
  double alpha_;
  MwuVariant variant_ = MwuVariant::kNormal;
  std::vector<double> lower_;
};

}  // namespace

std::string to_string(PowerMode m) {
  return m == PowerMode::kEqualGroups ? "equal" : "fixed-control";
}

PowerMode parse_power_mode(const std::string& text) {
  if (text == "equal") return PowerMode::kEqualGroups;
  if (text == "fixed-control" || text == "fixed") return PowerMode::kFixedControl;
  throw Error(ErrorKind::kParameter, "unknown power mode '" + text + "'");
}

double mwu_power(double mean_a, double sd_a, double mean_b, double sd_b,
                 int n_a, int n_b, const PowerOptions& o) {
  validate(sd_a, sd_b, o);
  if (n_a < 1 || n_b < 1) {
    throw Error(ErrorKind::kParameter, "group sizes must be positive");
  }
  const Rejector rejector(n_a, n_b, o.alpha, o.variant);
  unsigned threads = o.threads > 0 ? static_cast<unsigned>(o.threads)
                                   : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, 64u);
  const int reps = o.replicates;
  auto run = [&](int begin, int end) {
    long rejected = 0;
    std::vector<double> a(static_cast<size_t>(n_a));
    for (int r = begin; r < end; ++r) {
      const auto stream = static_cast<std::uint64_t>(r);
      std::mt19937_64 rng_a(derive_seed(o.seed, 2 * stream));
      std::mt19937_64 rng_b(derive_seed(o.seed, 2 * stream + 1));
      // U depends on ranks only, so the control sample is mapped through the
      // experimental CDF and each experimental draw b = mean_b + sd_b *
      // Phi^-1(v) reduces to its uniform v.
      for (double& v : a) {
        const double x = mean_a + sd_a * standard_normal(rng_a);
        v = 0.5 * std::erfc(-(x - mean_b) / sd_b / std::sqrt(2.0));
      }
      std::sort(a.begin(), a.end());
      double u = 0.0;  // pairs with a > b
      for (int j = 0; j < n_b; ++j) {
        const double b = uniform01(rng_b);
        const auto range = std::equal_range(a.begin(), a.end(), b);
        u += static_cast<double>(a.end() - range.second) +
             0.5 * static_cast<double>(range.second - range.first);
      }
      if (rejector.reject(u)) ++rejected;
    }
    return rejected;
  };
  std::vector<std::future<long>> jobs;
  const int chunk = (reps + static_cast<int>(threads) - 1) /
                    static_cast<int>(threads);
  for (int begin = 0; begin < reps; begin += chunk) {
    jobs.push_back(std::async(std::launch::async, run, begin,
                              std::min(reps, begin + chunk)));
  }
  long rejected = 0;
  for (auto& j : jobs) rejected += j.get();
  return static_cast<double>(rejected) / reps;
}

PowerResult power_analysis(double mean_a, double sd_a, double mean_b,
                           double sd_b, const PowerOptions& o) {
  validate(sd_a, sd_b, o);
  PowerResult res;
  res.mode = o.mode;
  std::map<int, double> cache;
  auto power_at = [&](int n) {
    if (const auto it = cache.find(n); it != cache.end()) return it->second;
    const int n_a = o.mode == PowerMode::kEqualGroups ? n : o.control_n;
    const double p = mwu_power(mean_a, sd_a, mean_b, sd_b, n_a, n, o);
    cache.emplace(n, p);
    return p;
  };
  int lo = 1;  // largest n known to miss the target (1 is never tested)
  int hi = 0;
  // Settle reachability at max_n first; the doubling search below then only
  // runs when an answer exists.
  if (power_at(o.max_n) >= o.target_power) {
    for (int n = 2; n < o.max_n; n *= 2) {
      if (power_at(n) >= o.target_power) {
        hi = n;
        break;
      }
      lo = n;
    }
    if (hi == 0) hi = o.max_n;
  }
  if (hi != 0) {
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      if (power_at(mid) >= o.target_power) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    res.required_n = hi;
    res.achieved_power = cache.at(hi);
  } else {
    res.achieved_power = cache.at(o.max_n);
  }
  res.curve.assign(cache.begin(), cache.end());
  return res;
}

}  // namespace ciplan::stats
