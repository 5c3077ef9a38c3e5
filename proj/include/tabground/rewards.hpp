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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabground/engine.hpp"

namespace tabground {

/// Longest common subsequence length under case-insensitive token equality.
/// O(|a||b|) time, O(min(|a|,|b|)) space.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Lexical step reward: LCS(question, Enc(s)) / |Enc(s)| over whitespace
/// words of the canonical serialization.
struct TabRougeState {
  std::size_t enc_len = 0;
  std::size_t lcs_len = 0;
  double score = 0.0;
};

std::vector<std::string> encode_state(const Table& table);

/// Throws EmptyEncoding when `encoding` is empty.
TabRougeState tabrouge(std::span<const std::string> question, std::span<const std::string> encoding);
TabRougeState tabrouge(std::string_view question, const TableState& state);

/// Normalized exact match, or for two numeric strings a relative tolerance
/// on the gold value (a gold value of 0 needs an exact 0).
bool match_answer(std::string_view pred, std::string_view gold, double relative_tolerance = 0.02);

struct RewardSignal {
  std::string name;
  double value = 0.0;
  std::string rationale;
};

nlohmann::json reward_to_json(const RewardSignal& r);
/// Throws FormatError, or InvalidArgument for a value outside [0, 1].
RewardSignal reward_from_json(const nlohmann::json& j);

/// A content-based score of the state a step produced. Implementations must
/// be safe to call concurrently.
class StepReward {
 public:
  virtual ~StepReward() = default;
  virtual std::string_view name() const = 0;
  virtual RewardSignal evaluate(std::string_view question, const TableState& next_state) const = 0;
};

class TabRougeReward final : public StepReward {
 public:
  std::string_view name() const override { return "tabrouge"; }
  RewardSignal evaluate(std::string_view question, const TableState& next_state) const override;
};

}  // namespace tabground
