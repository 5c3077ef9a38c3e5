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

#include "tabground/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "tabground/error.hpp"

namespace tabground {

namespace {

struct Ranking {
  std::vector<double> ranks;       // 1-based mid-ranks, aligned with the input
  double tie_term = 0.0;           // sum over tie groups of t^3 - t
};

Ranking mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  Ranking out{std::vector<double>(n, 0.0), 0.0};
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = rank;
    const auto t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

double upper_normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

void finish_two_sided(TestResult& r) {
  r.p_greater = std::min(1.0, r.p_greater);
  r.p_less = std::min(1.0, r.p_less);
  r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_greater, r.p_less));
}

}  // namespace

double auroc(std::span<const ScoredLabel> data) {
  std::vector<double> scores;
  scores.reserve(data.size());
  std::size_t n_pos = 0;
  for (const auto& d : data) {
    scores.push_back(d.score);
    n_pos += d.positive ? 1 : 0;
  }
  const std::size_t n_neg = data.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw SingleClass("AUROC needs both positive and negative labels");

  const Ranking ranking = mid_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].positive) rank_sum += ranking.ranks[i];
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double agreement(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size() || a.empty()) throw LengthMismatch("label sequences must be non-empty and equal length");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b) {
  const double p_o = agreement(a, b);
  std::map<std::string, std::pair<std::size_t, std::size_t>> marginals;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++marginals[a[i]].first;
    ++marginals[b[i]].second;
  }
  const auto n = static_cast<double>(a.size());
  double p_e = 0.0;
  for (const auto& [label, counts] : marginals) {
    p_e += (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
  }
  if (p_e >= 1.0) {
    if (p_o >= 1.0) return 1.0;
    throw DegenerateMarginals("chance agreement is 1 but observed agreement is not");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

double binomial_sd(double p, std::size_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("proportion must lie in [0, 1]");
  if (n == 0) throw InvalidArgument("binomial_sd needs n >= 1");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double macro_standard_error(std::span<const double> proportions, std::size_t n) {
  if (proportions.empty()) throw InvalidArgument("macro standard error needs at least one proportion");
  if (n == 0) throw InvalidArgument("macro standard error needs n >= 1");
  double var_sum = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("proportion must lie in [0, 1]");
    var_sum += p * (1.0 - p);
  }
  return std::sqrt(var_sum / static_cast<double>(n)) / static_cast<double>(proportions.size());
}

TestResult wilcoxon_signed_rank(std::span<const double> diffs, PValueMethod method) {
  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (double d : diffs) {
    if (d == 0.0 || std::isnan(d)) continue;
    magnitudes.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  if (magnitudes.empty()) throw AllZeroDiffs("every paired difference is zero");

  const std::size_t n = magnitudes.size();
  const Ranking ranking = mid_ranks(magnitudes);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (positive[i]) w_plus += ranking.ranks[i];
  }

  TestResult r;
  r.statistic = w_plus;
  r.n = n;
  r.exact = method == PValueMethod::exact || (method == PValueMethod::automatic && n <= 20);

  if (r.exact) {
    // Mid-ranks are multiples of 1/2, so doubled ranks index an integer
    // support. dist[s] = P(2 W+ = s) under independent fair signs.
    std::vector<long> doubled(n);
    long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = std::lround(2.0 * ranking.ranks[i]);
      total += doubled[i];
    }
    std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
    dist[0] = 1.0;
    long reach = 0;
    for (long w : doubled) {
      for (long s = reach; s >= 0; --s) {
        const double mass = dist[static_cast<std::size_t>(s)] * 0.5;
        dist[static_cast<std::size_t>(s)] = mass;
        dist[static_cast<std::size_t>(s + w)] += mass;
      }
      reach += w;
    }
    const long observed = std::lround(2.0 * w_plus);
    r.p_greater = 0.0;
    r.p_less = 0.0;
    for (long s = 0; s <= total; ++s) {
      if (s >= observed) r.p_greater += dist[static_cast<std::size_t>(s)];
      if (s <= observed) r.p_less += dist[static_cast<std::size_t>(s)];
    }
  } else {
    const auto nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - ranking.tie_term / 48.0;
    if (var <= 0.0) {
      r.p_greater = r.p_less = 1.0;
    } else {
      const double sd = std::sqrt(var);
      r.p_greater = upper_normal_tail((w_plus - mean - 0.5) / sd);
      r.p_less = 1.0 - upper_normal_tail((w_plus - mean + 0.5) / sd);
    }
  }
  finish_two_sided(r);
  return r;
}

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, PValueMethod method) {
  if (x.empty() || y.empty()) throw InvalidArgument("Mann-Whitney needs two non-empty samples");
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  const std::size_t n = nx + ny;

  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const Ranking ranking = mid_ranks(pooled);

  const double base = static_cast<double>(nx) * static_cast<double>(nx + 1) / 2.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < nx; ++i) rank_sum += ranking.ranks[i];

  TestResult r;
  r.statistic = rank_sum - base;
  r.n = n;
  r.exact = method == PValueMethod::exact || (method == PValueMethod::automatic && n <= 12);

  if (r.exact) {
    if (n > 20) throw InvalidArgument("exact Mann-Whitney enumeration is limited to 20 observations");
    // Every assignment of nx pooled positions to x is equally likely.
    std::size_t total = 0;
    std::size_t ge = 0;
    std::size_t le = 0;
    const std::uint32_t limit = std::uint32_t{1} << n;
    for (std::uint32_t bits = 0; bits < limit; ++bits) {
      if (static_cast<std::size_t>(std::popcount(bits)) != nx) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (bits & (std::uint32_t{1} << i)) s += ranking.ranks[i];
      }
      const double u = s - base;
      ++total;
      // Mid-rank sums are multiples of 1/2 and compare exactly.
      if (u >= r.statistic) ++ge;
      if (u <= r.statistic) ++le;
    }
    r.p_greater = static_cast<double>(ge) / static_cast<double>(total);
    r.p_less = static_cast<double>(le) / static_cast<double>(total);
  } else {
    const auto fx = static_cast<double>(nx);
    const auto fy = static_cast<double>(ny);
    const auto fn = static_cast<double>(n);
    const double mean = fx * fy / 2.0;
    const double var = fx * fy / 12.0 * ((fn + 1.0) - ranking.tie_term / (fn * (fn - 1.0)));
    if (var <= 0.0) {
      r.p_greater = r.p_less = 1.0;
    } else {
      const double sd = std::sqrt(var);
      r.p_greater = upper_normal_tail((r.statistic - mean - 0.5) / sd);
      r.p_less = 1.0 - upper_normal_tail((r.statistic - mean + 0.5) / sd);
    }
  }
  finish_two_sided(r);
  return r;
}

std::optional<double> perm_sigma(std::span<const double> aurocs, std::size_t min_valid) {
  std::vector<double> valid;
  for (double a : aurocs) {
    if (std::isfinite(a)) valid.push_back(a);
  }
  if (valid.size() < std::max<std::size_t>(min_valid, 2)) return std::nullopt;
  const Eigen::Map<const Eigen::ArrayXd> v(valid.data(), static_cast<Eigen::Index>(valid.size()));
  if (v.maxCoeff() == v.minCoeff()) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v - mean).square().sum() / static_cast<double>(valid.size() - 1));
}

std::optional<double> median(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace tabground
