// Copyright 2026 The tabground Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference implementations and random generators shared by
// the unit and acceptance tests. Nothing here calls into the library's
// numeric code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Plain recursion over both sequences; exponential, keep inputs short.
inline std::size_t lcs_brute(const std::vector<std::string>& a, const std::vector<std::string>& b,
                             std::size_t i = 0, std::size_t j = 0) {
  if (i == a.size() || j == b.size()) return 0;
  if (a[i] == b[j]) return 1 + lcs_brute(a, b, i + 1, j + 1);
  return std::max(lcs_brute(a, b, i + 1, j), lcs_brute(a, b, i, j + 1));
}

/// O(n^2) pair counting: wins + half ties over positive/negative pairs.
inline double auroc_pairs(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Mid-ranks of |d| for the nonzero diffs by direct counting.
inline std::vector<double> abs_midranks(const std::vector<double>& d) {
  std::vector<double> ranks(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double below = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) below += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
    }
    ranks[i] = below + (equal + 1.0) / 2.0;
  }
  return ranks;
}

struct Tail {
  double statistic = 0.0;
  double p_greater = 0.0;
  double p_less = 0.0;
  double p_two_sided = 0.0;
};

/// Signed-rank null distribution by visiting all 2^n sign assignments.
inline Tail wilcoxon_enumerate(std::vector<double> diffs) {
  diffs.erase(std::remove(diffs.begin(), diffs.end(), 0.0), diffs.end());
  const auto ranks = abs_midranks(diffs);
  Tail t;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) t.statistic += ranks[i];
  }
  const std::uint64_t total = std::uint64_t{1} << diffs.size();
  std::uint64_t ge = 0;
  std::uint64_t le = 0;
  for (std::uint64_t signs = 0; signs < total; ++signs) {
    double w = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      if (signs >> i & 1U) w += ranks[i];
    }
    if (w >= t.statistic - 1e-9) ++ge;
    if (w <= t.statistic + 1e-9) ++le;
  }
  t.p_greater = static_cast<double>(ge) / static_cast<double>(total);
  t.p_less = static_cast<double>(le) / static_cast<double>(total);
  t.p_two_sided = std::min(1.0, 2.0 * std::min(t.p_greater, t.p_less));
  return t;
}

inline double u_statistic(const std::vector<double>& x, const std::vector<double>& y) {
  double u = 0.0;
  for (double a : x) {
    for (double b : y) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  return u;
}

inline void assignments(std::size_t start, std::size_t need, std::vector<std::size_t>& chosen, std::size_t n,
                        const std::vector<double>& pooled, double observed, std::uint64_t& ge, std::uint64_t& le,
                        std::uint64_t& total) {
  if (need == 0) {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<bool> in_x(n, false);
    for (auto i : chosen) in_x[i] = true;
    for (std::size_t i = 0; i < n; ++i) (in_x[i] ? x : y).push_back(pooled[i]);
    const double u = u_statistic(x, y);
    ++total;
    if (u >= observed - 1e-9) ++ge;
    if (u <= observed + 1e-9) ++le;
    return;
  }
  for (std::size_t i = start; i + need <= n; ++i) {
    chosen.push_back(i);
    assignments(i + 1, need - 1, chosen, n, pooled, observed, ge, le, total);
    chosen.pop_back();
  }
}

/// Rank-sum null distribution by visiting every split of the pooled sample.
inline Tail mann_whitney_enumerate(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  Tail t;
  t.statistic = u_statistic(x, y);
  std::uint64_t ge = 0;
  std::uint64_t le = 0;
  std::uint64_t total = 0;
  std::vector<std::size_t> chosen;
  assignments(0, x.size(), chosen, pooled.size(), pooled, t.statistic, ge, le, total);
  t.p_greater = static_cast<double>(ge) / static_cast<double>(total);
  t.p_less = static_cast<double>(le) / static_cast<double>(total);
  t.p_two_sided = std::min(1.0, 2.0 * std::min(t.p_greater, t.p_less));
  return t;
}

/// Cohen's kappa of a 2x2 table [[a, b], [c, d]] (rows: rater 1, cols: rater 2).
inline double kappa_2x2(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double po = (a + d) / n;
  const double pe = ((a + b) * (a + c) + (c + d) * (b + d)) / (n * n);
  return (po - pe) / (1.0 - pe);
}

inline double sample_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                                             int alphabet = 4) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> letter(0, alphabet - 1);
  std::vector<std::string> out(len(rng));
  for (auto& w : out) w = std::string(1, static_cast<char>('a' + letter(rng)));
  return out;
}

/// Scores drawn from a small grid so ties are common.
inline std::vector<double> tied_scores(std::mt19937_64& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::vector<double> out(n);
  for (auto& s : out) s = level(rng) / static_cast<double>(levels);
  return out;
}

}  // namespace oracle
