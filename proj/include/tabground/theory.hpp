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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace tabground {

struct TheoryOptions {
  std::size_t paths = 10000;
  std::size_t steps = 8;
  double sigma = 1.0;
  std::size_t token_cases = 100;
  std::size_t prune_cases = 100;
};

struct TheoryCheck {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::size_t failures = 0;
  nlohmann::json detail;
};

struct TheoryReport {
  std::uint64_t seed = 0;
  std::vector<TheoryCheck> checks;
  bool all_passed() const;
};

/// Unclipped Gaussian random walk Y_S = Y_{S-1} + N(0, sigma^2). Passes when
/// the sample variances are nondecreasing in S and each lies within two
/// standard errors, S sigma^2 sqrt(2 / (paths - 1)), of S sigma^2.
TheoryCheck check_variance_growth(std::uint64_t seed, const TheoryOptions& options = {});

/// Deleting a run of tokens outside an LCS alignment strictly raises TABROUGE
/// whenever the LCS is nonzero.
TheoryCheck check_deletion(std::uint64_t seed, const TheoryOptions& options = {});

/// Appending tokens moves the score up, down or not at all exactly as
/// delta_c * L compares with c * delta_L; appends with no new overlap lower
/// a positive score.
TheoryCheck check_append(std::uint64_t seed, const TheoryOptions& options = {});

/// Filters that keep the LCS and shrink the state never lower TABROUGE.
TheoryCheck check_pruning(std::uint64_t seed, const TheoryOptions& options = {});

/// Sorting a ten-row element table leaves TABROUGE unchanged.
TheoryCheck check_sort_invariance();

TheoryReport theory_checks(std::uint64_t seed, const TheoryOptions& options = {});

nlohmann::json to_json(const TheoryCheck& check);
nlohmann::json to_json(const TheoryReport& report);

}  // namespace tabground
