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

#include "tabground/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tabground/engine.hpp"
#include "tabground/rewards.hpp"
#include "tabground/synthetic.hpp"
#include "tabground/text.hpp"

namespace tabground {

namespace {

using Tokens = std::vector<std::string>;

Tokens random_tokens(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  static const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
  Tokens out(len(rng));
  for (auto& t : out) t = vocab[pick(rng)];
  return out;
}

/// Positions of `s` used by one maximum alignment with `q`.
std::vector<bool> lcs_alignment(const Tokens& q, const Tokens& s) {
  const std::size_t n = q.size();
  const std::size_t m = s.size();
  std::vector<std::vector<std::size_t>> dp(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      dp[i][j] = q[i - 1] == s[j - 1] ? dp[i - 1][j - 1] + 1 : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  std::vector<bool> used(m, false);
  for (std::size_t i = n, j = m; i > 0 && j > 0;) {
    if (q[i - 1] == s[j - 1] && dp[i][j] == dp[i - 1][j - 1] + 1) {
      used[j - 1] = true;
      --i;
      --j;
    } else if (dp[i - 1][j] >= dp[i][j - 1]) {
      --i;
    } else {
      --j;
    }
  }
  return used;
}

int sign(long long v) { return (v > 0) - (v < 0); }

}  // namespace

bool TheoryReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const TheoryCheck& c) { return c.passed; });
}

TheoryCheck check_variance_growth(std::uint64_t seed, const TheoryOptions& options) {
  TheoryCheck check{"variance_growth", false, options.steps, 0, nlohmann::json::object()};
  if (options.paths < 2 || options.steps < 1) throw InvalidArgument("variance check needs >= 2 paths and >= 1 step");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, options.sigma);
  std::vector<double> y(options.paths, 0.0);
  std::vector<double> variances;
  std::vector<double> expected;
  std::vector<double> standard_errors;
  const double n = static_cast<double>(options.paths);
  for (std::size_t s = 1; s <= options.steps; ++s) {
    for (auto& v : y) v += step(rng);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    variances.push_back(ss / (n - 1.0));
    expected.push_back(static_cast<double>(s) * options.sigma * options.sigma);
    standard_errors.push_back(expected.back() * std::sqrt(2.0 / (n - 1.0)));
  }
  std::size_t non_monotone = 0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < variances.size(); ++i) {
    if (i > 0 && variances[i] < variances[i - 1]) ++non_monotone;
    if (std::abs(variances[i] - expected[i]) > 2.0 * standard_errors[i]) ++outside;
  }
  check.failures = non_monotone + outside;
  check.passed = check.failures == 0;
  check.detail = {{"paths", options.paths},
                  {"variance", variances},
                  {"expected", expected},
                  {"standard_error", standard_errors},
                  {"non_monotone_steps", non_monotone},
                  {"outside_two_se", outside}};
  return check;
}

TheoryCheck check_deletion(std::uint64_t seed, const TheoryOptions& options) {
  TheoryCheck check{"deletion_strict_increase", false, 0, 0, nlohmann::json::object()};
  std::mt19937_64 rng(mix64(seed, 2));
  std::size_t attempts = 0;
  while (check.cases < options.token_cases && attempts < 100 * options.token_cases + 100) {
    ++attempts;
    const Tokens q = random_tokens(rng, 1, 8);
    const Tokens s = random_tokens(rng, 2, 14);
    const std::vector<bool> used = lcs_alignment(q, s);
    const std::size_t c = lcs_length(q, s);
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!used[j]) free.push_back(j);
    }
    if (c == 0 || free.empty()) continue;
    // Longest run of unaligned positions that contains a random unaligned start.
    std::size_t begin = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    std::size_t end = begin + 1;
    while (end < s.size() && !used[end] && std::bernoulli_distribution(0.5)(rng)) ++end;
    Tokens pruned(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(begin));
    pruned.insert(pruned.end(), s.begin() + static_cast<std::ptrdiff_t>(end), s.end());
    ++check.cases;
    const double before = tabrouge(q, s).score;
    const double after = tabrouge(q, pruned).score;
    if (!(after > before)) ++check.failures;
  }
  check.passed = check.failures == 0 && check.cases == options.token_cases;
  check.detail = {{"attempts", attempts}};
  return check;
}

TheoryCheck check_append(std::uint64_t seed, const TheoryOptions& options) {
  TheoryCheck check{"append_direction", false, 0, 0, nlohmann::json::object()};
  std::mt19937_64 rng(mix64(seed, 3));
  std::size_t decreases = 0;
  std::size_t increases = 0;
  std::size_t unchanged = 0;
  std::size_t zero_gain_cases = 0;
  for (std::size_t i = 0; i < options.token_cases; ++i) {
    const Tokens q = random_tokens(rng, 1, 8);
    const Tokens s = random_tokens(rng, 1, 12);
    Tokens gamma = random_tokens(rng, 1, 6);
    const bool zero_gain = i % 2 == 0;
    if (zero_gain) {
      for (auto& t : gamma) t = "zz";  // never in the vocabulary
    }
    Tokens grown = s;
    grown.insert(grown.end(), gamma.begin(), gamma.end());
    const auto before = tabrouge(q, s);
    const auto after = tabrouge(q, grown);
    const long long delta_c = static_cast<long long>(after.lcs_len) - static_cast<long long>(before.lcs_len);
    const long long predicted =
        sign(delta_c * static_cast<long long>(before.enc_len) -
             static_cast<long long>(before.lcs_len) * static_cast<long long>(gamma.size()));
    const int observed = (after.score > before.score) - (after.score < before.score);
    ++check.cases;
    bool ok = observed == predicted;
    if (zero_gain && before.lcs_len > 0) {
      ++zero_gain_cases;
      ok = ok && observed < 0;
    }
    if (!ok) ++check.failures;
    if (observed < 0) ++decreases;
    if (observed > 0) ++increases;
    if (observed == 0) ++unchanged;
  }
  check.passed = check.failures == 0 && zero_gain_cases > 0;
  check.detail = {{"decreases", decreases},
                  {"increases", increases},
                  {"unchanged", unchanged},
                  {"zero_gain_positive_lcs", zero_gain_cases}};
  return check;
}

TheoryCheck check_pruning(std::uint64_t seed, const TheoryOptions& options) {
  TheoryCheck check{"pruning_non_decrease", false, 0, 0, nlohmann::json::object()};
  std::mt19937_64 rng(mix64(seed, 4));
  std::size_t applicable = 0;
  std::size_t attempts = 0;
  while (check.cases < options.prune_cases && attempts < 100 * options.prune_cases + 100) {
    ++attempts;
    const Table table = random_table(rng, {2, 8, 1, 4});
    const std::size_t anchor = std::uniform_int_distribution<std::size_t>(0, table.n_rows() - 1)(rng);
    const std::size_t col = std::uniform_int_distribution<std::size_t>(0, table.n_cols() - 1)(rng);
    const std::string& value = table.cell(anchor, col);
    if (trim(value).empty()) continue;
    const std::string question = "which " + table.columns()[col] + " is " + value + " ?";
    const TableState before_state{table, 0, std::nullopt};
    const StepOutcome outcome = execute(before_state, ToolCall(FilterCall{table.columns()[col], CompareOp::eq, value}));
    if (!outcome.ok() || outcome.state().table.n_rows() == table.n_rows()) continue;
    ++check.cases;
    const auto before = tabrouge(question, before_state);
    const auto after = tabrouge(question, outcome.state());
    if (after.lcs_len != before.lcs_len) continue;
    ++applicable;
    const bool ok = before.lcs_len > 0 ? after.score > before.score : after.score >= before.score;
    if (!ok) ++check.failures;
  }
  check.passed = check.failures == 0 && applicable > 0 && check.cases == options.prune_cases;
  check.detail = {{"attempts", attempts}, {"lcs_preserved", applicable}};
  return check;
}

TheoryCheck check_sort_invariance() {
  TheoryCheck check{"sort_invariance", false, 1, 0, nlohmann::json::object()};
  const Table table({"element", "atom_num"}, {{"Zn", "30"},
                                              {"Fe", "26"},
                                              {"Cu", "29"},
                                              {"Mn", "25"},
                                              {"Ni", "28"},
                                              {"Cr", "24"},
                                              {"Co", "27"},
                                              {"V", "23"},
                                              {"Ti", "22"},
                                              {"Sc", "21"}});
  const std::string question = "What is the element before Cu?";
  const TableState before_state{table, 0, std::nullopt};
  const StepOutcome outcome = execute(before_state, ToolCall(SortCall{"atom_num", SortDirection::ascending}));
  const auto before = tabrouge(question, before_state);
  const auto after = tabrouge(question, outcome.state());
  check.passed = outcome.ok() && before.score == after.score;
  check.failures = check.passed ? 0 : 1;
  check.detail = {{"before", before.score}, {"after", after.score}, {"lcs", before.lcs_len}, {"tokens", before.enc_len}};
  return check;
}

TheoryReport theory_checks(std::uint64_t seed, const TheoryOptions& options) {
  TheoryReport report;
  report.seed = seed;
  report.checks.push_back(check_variance_growth(seed, options));
  report.checks.push_back(check_deletion(seed, options));
  report.checks.push_back(check_append(seed, options));
  report.checks.push_back(check_pruning(seed, options));
  report.checks.push_back(check_sort_invariance());
  return report;
}

nlohmann::json to_json(const TheoryCheck& check) {
  return {{"name", check.name},
          {"passed", check.passed},
          {"cases", check.cases},
          {"failures", check.failures},
          {"detail", check.detail}};
}

nlohmann::json to_json(const TheoryReport& report) {
  nlohmann::json j = {{"seed", report.seed}, {"all_passed", report.all_passed()}, {"checks", nlohmann::json::array()}};
  for (const auto& c : report.checks) j["checks"].push_back(to_json(c));
  return j;
}

}  // namespace tabground
