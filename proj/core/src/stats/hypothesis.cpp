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

#include "ciplan/stats/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ciplan/error.hpp"
#include "ciplan/random.hpp"

namespace ciplan::stats {
namespace {

void require_finite(std::span<const double> s, const char* what) {
  for (double v : s) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kParameter,
                  std::string(what) + " contains a non-finite value");
    }
  }
}

double mean_of(std::span<const double> s) {
  return std::accumulate(s.begin(), s.end(), 0.0) /
         static_cast<double>(s.size());
}

double median_of(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double two_sided_normal(double z) {
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

double two_sided_t(double t, double df) {
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(complement(dist, std::abs(t))));
}

// Midranks of the pooled sample plus the tie term sum(t^3 - t).
struct Ranks {
  std::vector<double> rank;
  double tie_term = 0.0;
  bool ties = false;
};

Ranks midranks(std::span<const double> pooled) {
  const size_t n = pooled.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return pooled[a] < pooled[b];
  });
  Ranks out;
  out.rank.assign(n, 0.0);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) out.rank[order[k]] = r;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) {
      out.ties = true;
      out.tie_term += t * t * t - t;
    }
    i = j + 1;
  }
  return out;
}

double ks_statistic(std::vector<double> v) {
  const size_t n = v.size();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::sort(v.begin(), v.end());
  double d = 0.0;
  const double nn = static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    const double f = 0.5 * std::erfc(-(v[i] - m) / sd / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(i + 1) / nn - f,
                  f - static_cast<double>(i) / nn});
  }
  return d;
}

}  // namespace

GroupSummary summarize(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorKind::kEmptyGroup, "empty group");
  require_finite(sample, "sample");
  GroupSummary s;
  s.n = static_cast<int>(sample.size());
  s.mean = mean_of(sample);
  double ss = 0.0;
  for (double v : sample) ss += (v - s.mean) * (v - s.mean);
  s.sd_population = std::sqrt(ss / static_cast<double>(sample.size()));
  return s;
}

std::string to_string(MwuVariant v) {
  switch (v) {
    case MwuVariant::kAuto: return "auto";
    case MwuVariant::kExact: return "exact";
    case MwuVariant::kNormalCc: return "normal-tie-cc";
    case MwuVariant::kNormal: return "normal-tie";
  }
  return "?";
}

std::vector<double> mann_whitney_exact_pmf(int n1, int n2) {
  if (n1 < 1 || n2 < 1) {
    throw Error(ErrorKind::kParameter, "exact U needs n >= 1 per sample");
  }
  // Coefficients of the Gaussian binomial [n1+n2 choose n1]_q, built as
  // prod_{i=1..n1} (1 - q^(n2+i)) / (1 - q^i).
  const int max_u = n1 * n2;
  std::vector<double> c(static_cast<size_t>(max_u) + 1, 0.0);
  c[0] = 1.0;
  for (int i = 1; i <= n1; ++i) {
    // After step i the coefficients are those of [n2+i choose i]_q, so every
    // intermediate stays a nonnegative integer. Terms past max_u never
    // influence lower ones and are dropped.
    const int up = n2 + i;
    for (int k = max_u; k >= up; --k) {
      c[static_cast<size_t>(k)] -= c[static_cast<size_t>(k - up)];
    }
    // Divide by (1 - q^i): b[k] = a[k] + b[k - i].
    for (int k = i; k <= max_u; ++k) {
      c[static_cast<size_t>(k)] += c[static_cast<size_t>(k - i)];
    }
  }
  double total = 0.0;
  for (double& v : c) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : c) v /= total;
  return c;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          MwuVariant variant) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kEmptyGroup, "Mann-Whitney U needs n >= 1 per sample");
  }
  require_finite(a, "sample_a");
  require_finite(b, "sample_b");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranks ranks = midranks(pooled);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  double r1 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) r1 += ranks.rank[i];
  const double u = r1 - n1 * (n1 + 1.0) / 2.0;

  TestResult res;
  res.test_name = "mann_whitney_u";
  res.statistic = u;
  res.n1 = static_cast<int>(a.size());
  res.n2 = static_cast<int>(b.size());

  MwuVariant use = variant;
  if (use == MwuVariant::kAuto) {
    use = (n1 * n2 <= 400.0 && !ranks.ties) ? MwuVariant::kExact
                                            : MwuVariant::kNormalCc;
  }
  res.method_variant = to_string(use);
  if (use == MwuVariant::kExact) {
    if (ranks.ties) {
      throw Error(ErrorKind::kParameter,
                  "exact Mann-Whitney distribution requires untied data");
    }
    const auto pmf = mann_whitney_exact_pmf(res.n1, res.n2);
    const auto k = static_cast<size_t>(std::llround(u));
    double lower = 0.0;
    double upper = 0.0;
    for (size_t i = 0; i < pmf.size(); ++i) {
      if (i <= k) lower += pmf[i];
      if (i >= k) upper += pmf[i];
    }
    res.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
    return res;
  }
  const double n = n1 + n2;
  const double var =
      n1 * n2 / 12.0 * ((n + 1.0) - ranks.tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    res.degenerate = true;
    res.p_value = 1.0;
    return res;
  }
  double dev = std::abs(u - n1 * n2 / 2.0);
  if (use == MwuVariant::kNormalCc) dev = std::max(0.0, dev - 0.5);
  res.p_value = two_sided_normal(dev / std::sqrt(var));
  return res;
}

TestResult paired_t(std::span<const double> before,
                    std::span<const double> after) {
  if (before.size() != after.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "paired t-test needs equally long samples");
  }
  if (before.size() < 2) {
    throw Error(ErrorKind::kParameter, "paired t-test needs n >= 2");
  }
  require_finite(before, "before");
  require_finite(after, "after");
  std::vector<double> d(before.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = after[i] - before[i];
  const double n = static_cast<double>(d.size());
  const double m = mean_of(d);
  double ss = 0.0;
  for (double v : d) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / (n - 1.0));

  TestResult res;
  res.test_name = "paired_t";
  res.n1 = res.n2 = static_cast<int>(d.size());
  res.method_variant = "student-paired";
  if (!(sd > 0.0)) {
    res.degenerate = true;
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  res.statistic = m / (sd / std::sqrt(n));
  res.p_value = two_sided_t(res.statistic, n - 1.0);
  return res;
}

TestResult brown_forsythe(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorKind::kParameter, "Brown-Forsythe needs n >= 2 per sample");
  }
  require_finite(a, "sample_a");
  require_finite(b, "sample_b");
  auto deviations = [](std::span<const double> s) {
    const double med = median_of(s);
    std::vector<double> z;
    for (double v : s) z.push_back(std::abs(v - med));
    return z;
  };
  const std::vector<std::vector<double>> z{deviations(a), deviations(b)};
  double total = 0.0;
  double count = 0.0;
  for (const auto& g : z) {
    total += std::accumulate(g.begin(), g.end(), 0.0);
    count += static_cast<double>(g.size());
  }
  const double grand = total / count;
  double between = 0.0;
  double within = 0.0;
  for (const auto& g : z) {
    const double m = mean_of(g);
    between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) within += (v - m) * (v - m);
  }
  const double df1 = 1.0;
  const double df2 = count - 2.0;

  TestResult res;
  res.test_name = "brown_forsythe";
  res.n1 = static_cast<int>(a.size());
  res.n2 = static_cast<int>(b.size());
  res.method_variant = "levene-median";
  if (!(within > 0.0)) {
    res.degenerate = true;
    res.statistic = between > 0.0 ? INFINITY : 0.0;
    res.p_value = between > 0.0 ? 0.0 : 1.0;
    return res;
  }
  res.statistic = (between / df1) / (within / df2);
  const boost::math::fisher_f dist(df1, df2);
  res.p_value = boost::math::cdf(complement(dist, res.statistic));
  return res;
}

TestResult ks_normality(std::span<const double> sample, std::uint64_t seed,
                        int replicates) {
  if (sample.size() < 4) {
    throw Error(ErrorKind::kParameter, "KS normality test needs n >= 4");
  }
  if (replicates < 1) {
    throw Error(ErrorKind::kParameter, "replicates must be positive");
  }
  require_finite(sample, "sample");
  TestResult res;
  res.test_name = "ks_normality";
  res.n1 = static_cast<int>(sample.size());
  res.method_variant = "lilliefors-monte-carlo";
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  if (*lo == *hi) {
    res.degenerate = true;
    res.p_value = 1.0;
    return res;
  }
  res.statistic = ks_statistic({sample.begin(), sample.end()});
  std::mt19937_64 rng(seed);
  std::vector<double> sim(sample.size());
  int exceed = 0;
  for (int r = 0; r < replicates; ++r) {
    for (double& v : sim) v = standard_normal(rng);
    if (ks_statistic(sim) >= res.statistic) ++exceed;
  }
  res.p_value = (1.0 + exceed) / (1.0 + replicates);
  return res;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch, "pearson needs equally long samples");
  }
  if (x.size() < 3) throw Error(ErrorKind::kParameter, "pearson needs n >= 3");
  require_finite(x, "x");
  require_finite(y, "y");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorKind::kDegenerate, "pearson: zero variance");
  }
  Correlation c;
  c.n = static_cast<int>(x.size());
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(c.n - 2);
  if (std::abs(c.r) >= 1.0) {
    c.p_value = 0.0;
  } else if (df > 0.0) {
    c.p_value = two_sided_t(c.r * std::sqrt(df / (1.0 - c.r * c.r)), df);
  }
  return c;
}

BandPoint OlsFit::at(double x) const {
  BandPoint p;
  p.x = x;
  p.fit = intercept + slope * x;
  const double se =
      residual_se * std::sqrt(1.0 / n + (x - mean_x) * (x - mean_x) / sxx);
  p.lower = p.fit - t_quantile * se;
  p.upper = p.fit + t_quantile * se;
  return p;
}

std::vector<BandPoint> OlsFit::band(int count) const {
  if (count < 2) throw Error(ErrorKind::kParameter, "band needs >= 2 samples");
  std::vector<BandPoint> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(at(x_min + (x_max - x_min) * i / (count - 1)));
  }
  return out;
}

OlsFit ols_with_ci(std::span<const double> x, std::span<const double> y,
                   double level) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch, "ols needs equally long samples");
  }
  if (x.size() < 3) throw Error(ErrorKind::kParameter, "ols needs n >= 3");
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::kParameter, "confidence level must be in (0, 1)");
  }
  require_finite(x, "x");
  require_finite(y, "y");
  OlsFit f;
  f.n = static_cast<int>(x.size());
  f.level = level;
  f.mean_x = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    f.sxx += (x[i] - f.mean_x) * (x[i] - f.mean_x);
    sxy += (x[i] - f.mean_x) * (y[i] - my);
  }
  if (!(f.sxx > 0.0)) throw Error(ErrorKind::kDegenerate, "ols: zero x variance");
  f.slope = sxy / f.sxx;
  f.intercept = my - f.slope * f.mean_x;
  double sse = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  const double df = static_cast<double>(f.n - 2);
  f.residual_se = std::sqrt(sse / df);
  f.t_quantile =
      boost::math::quantile(boost::math::students_t(df), 0.5 + 0.5 * level);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  f.x_min = *lo;
  f.x_max = *hi;
  return f;
}

}  // namespace ciplan::stats
