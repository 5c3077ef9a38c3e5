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

#include "tabground/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tabground/text.hpp"

namespace tabground {

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return 0;

  std::vector<std::string> la(a.begin(), a.end());
  std::vector<std::string> lb(b.begin(), b.end());
  for (auto& s : la) s = to_lower(s);
  for (auto& s : lb) s = to_lower(s);

  // One row over the shorter sequence.
  std::vector<std::size_t> row(lb.size() + 1, 0);
  for (const auto& x : la) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= lb.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = (x == lb[j - 1]) ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row.back();
}

std::vector<std::string> encode_state(const Table& table) { return tokenize_words(serialize(table).text); }

TabRougeState tabrouge(std::span<const std::string> question, std::span<const std::string> encoding) {
  if (encoding.empty()) throw EmptyEncoding("state serialization has no tokens");
  TabRougeState s;
  s.enc_len = encoding.size();
  s.lcs_len = lcs_length(question, encoding);
  s.score = static_cast<double>(s.lcs_len) / static_cast<double>(s.enc_len);
  return s;
}

TabRougeState tabrouge(std::string_view question, const TableState& state) {
  const auto q = tokenize_words(question);
  const auto enc = encode_state(state.table);
  return tabrouge(q, enc);
}

bool match_answer(std::string_view pred, std::string_view gold, double relative_tolerance) {
  if (normalize_text(pred) == normalize_text(gold)) return true;
  const auto p = parse_number(pred);
  const auto g = parse_number(gold);
  if (!p || !g) return false;
  if (*g == 0.0) return *p == 0.0;
  // The slack absorbs representation error at the inclusive boundary.
  return std::fabs(*p - *g) <= relative_tolerance * std::fabs(*g) * (1.0 + 1e-12);
}

nlohmann::json reward_to_json(const RewardSignal& r) {
  return {{"name", r.name}, {"value", r.value}, {"rationale", r.rationale}};
}

RewardSignal reward_from_json(const nlohmann::json& j) {
  RewardSignal r;
  try {
    r.name = j.at("name").get<std::string>();
    r.value = j.at("value").get<double>();
    r.rationale = j.value("rationale", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("reward signal: ") + e.what());
  }
  if (!(r.value >= 0.0 && r.value <= 1.0)) throw InvalidArgument("reward value outside [0, 1]");
  return r;
}

RewardSignal TabRougeReward::evaluate(std::string_view question, const TableState& next_state) const {
  const auto s = tabrouge(question, next_state);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "lcs=%zu of %zu state tokens", s.lcs_len, s.enc_len);
  return {"tabrouge", s.score, buf};
}

}  // namespace tabground
