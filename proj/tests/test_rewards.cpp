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

#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "tabground/engine.hpp"
#include "tabground/rewards.hpp"
#include "tabground/text.hpp"

using namespace tabground;

namespace {

std::vector<std::string> words(std::string_view s) { return tokenize_words(s); }

}  // namespace

TEST_SUITE("rewards") {

TEST_CASE("lcs basics") {
  const auto x = words("a b c d e");
  CHECK(lcs_length(x, x) == 5);
  CHECK(lcs_length(x, {}) == 0);
  CHECK(lcs_length(x, words("a c e")) == 3);
  CHECK(lcs_length(words("The Cat"), words("the cat")) == 2);
}

TEST_CASE("lcs agrees with brute force on short sequences") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_words(rng, 0, 8);
    const auto b = oracle::random_words(rng, 0, 8);
    REQUIRE(lcs_length(a, b) == oracle::lcs_brute(a, b));
  }
}

TEST_CASE("tabrouge over a ten-token state") {
  // | a | b |  | --- | --- | has ten tokens; the question is four of them in order.
  const TableState state{Table({"a", "b"}), 0, std::nullopt};
  const auto r = tabrouge("| a b |", state);
  CHECK(r.enc_len == 10);
  CHECK(r.lcs_len == 4);
  CHECK(r.score == doctest::Approx(0.4));
}

TEST_CASE("sorting the element table leaves tabrouge at 1/60") {
  const Table t({"element", "atom_num"}, {{"Zn", "30"}, {"Fe", "26"}, {"Cu", "29"}, {"Mn", "25"}, {"Ni", "28"},
                                          {"Cr", "24"}, {"Co", "27"}, {"V", "23"}, {"Ti", "22"}, {"Sc", "21"}});
  const TableState before{t, 0, std::nullopt};
  const auto sorted = execute(before, SortCall{"atom_num", SortDirection::ascending});
  const std::string q = "What is the element before Cu?";
  const auto r0 = tabrouge(q, before);
  const auto r1 = tabrouge(q, sorted.state());
  CHECK(r0.score == r1.score);
  CHECK(r0.score == doctest::Approx(0.0167).epsilon(0.0001 / 0.0167));
}

TEST_CASE("removing off-alignment tokens raises the score") {
  const auto q = words("a b");
  const auto s = words("a x b y");
  const auto pruned = words("a b y");
  CHECK(tabrouge(q, pruned).score > tabrouge(q, s).score);
}

TEST_CASE("empty encoding") {
  CHECK_THROWS_AS(tabrouge(words("a"), std::vector<std::string>{}), EmptyEncoding);
}

TEST_CASE("answer matching") {
  CHECK(match_answer("62,740", "62740"));
  // 0.4 is 1.6% of 25.0, inside the tolerance; 0.6 is 2.4%, outside.
  CHECK(match_answer("25.4", "25.0"));
  CHECK_FALSE(match_answer("25.6", "25.0"));
  CHECK(match_answer("102", "100"));
  CHECK(match_answer(" Algeria ", "algeria"));
  CHECK_FALSE(match_answer("Morocco", "Algeria"));
  CHECK(match_answer("0", "0.0"));
  CHECK_FALSE(match_answer("0.001", "0"));
}

TEST_CASE("reward signals") {
  const TabRougeReward reward;
  const TableState state{Table({"a", "b"}), 0, std::nullopt};
  const RewardSignal s = reward.evaluate("| a b |", state);
  CHECK(s.name == "tabrouge");
  CHECK(s.value == doctest::Approx(0.4));
  CHECK(s.rationale == "lcs=4 of 10 state tokens");
  const RewardSignal back = reward_from_json(reward_to_json(s));
  CHECK(back.value == s.value);
  CHECK_THROWS(reward_from_json(nlohmann::json{{"name", "x"}, {"value", 1.5}, {"rationale", ""}}));
}

}  // TEST_SUITE
