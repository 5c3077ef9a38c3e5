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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "tabground/error.hpp"

namespace tabground {

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

/// P(score+ > score-) + 1/2 P(tie) over all positive/negative pairs, via
/// mid-ranks. Throws SingleClass unless both labels occur.
double auroc(std::span<const ScoredLabel> data);

/// Fraction of positions where the two label sequences agree.
double agreement(std::span<const std::string> a, std::span<const std::string> b);

/// (p_o - p_e) / (1 - p_e) with chance agreement from the marginal product.
/// Throws LengthMismatch for unequal or empty inputs; when p_e = 1 returns
/// 1 if p_o = 1 and throws DegenerateMarginals otherwise.
double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b);

/// sqrt(p (1 - p) / n)
double binomial_sd(double p, std::size_t n);

/// Standard error of a k-way macro average of proportions that share n:
/// (1/k) sqrt(sum_i p_i (1 - p_i) / n).
double macro_standard_error(std::span<const double> proportions, std::size_t n);

enum class PValueMethod { automatic, exact, normal };

struct TestResult {
  double statistic = 0.0;
  double p_two_sided = 1.0;
  double p_greater = 1.0;  ///< P(statistic >= observed) under the null
  double p_less = 1.0;     ///< P(statistic <= observed) under the null
  bool exact = false;
  std::size_t n = 0;       ///< effective sample size
};

/// Signed-rank test on paired differences. Zeros are dropped, |d| ranked with
/// mid-ranks on ties; the statistic is the positive rank sum W+. `automatic`
/// is exact for n <= 20 and normal (tie-corrected, continuity-corrected)
/// above. Throws AllZeroDiffs when nothing remains after zero removal.
TestResult wilcoxon_signed_rank(std::span<const double> diffs, PValueMethod method = PValueMethod::automatic);

/// Rank-sum test. The statistic is U for x: #(x > y) + 1/2 #(x == y).
/// `automatic` is exact (enumerating all group assignments) when
/// |x| + |y| <= 12 and tie-corrected normal otherwise. Throws InvalidArgument
/// for an empty sample.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          PValueMethod method = PValueMethod::automatic);

/// Sample (n - 1) standard deviation of per-ordering AUROCs. Non-finite
/// entries are not valid orderings; nullopt rejects the record when fewer
/// than `min_valid` remain.
std::optional<double> perm_sigma(std::span<const double> aurocs, std::size_t min_valid = 3);

/// Median of a non-empty sample; nullopt when empty.
std::optional<double> median(std::span<const double> values);

}  // namespace tabground
