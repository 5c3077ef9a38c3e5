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

#include "tabground/plan.hpp"
#include "tabground/synthetic.hpp"

using namespace tabground;

namespace {

const std::vector<std::string> kSchema = {"Name", "Country", "Score"};

Table five_by_three() {
  return Table(kSchema, {{"a", "Algeria", "1"}, {"b", "Chad", "2"}, {"c", "Algeria", "3"}, {"d", "Mali", "4"},
                         {"e", "Niger", "5"}});
}

}  // namespace

TEST_SUITE("plan") {

TEST_CASE("the aggregate example step") {
  const Plan p = parse_plan("Aggregate: count rows where Country = Algeria. [target: Country]", kSchema);
  REQUIRE(p.steps.size() == 1);
  CHECK(p.steps[0].tool == Tool::aggregate);
  REQUIRE(p.steps[0].target_parsed());
  CHECK(*p.steps[0].target == std::vector<TargetRef>{{"Country", std::nullopt}});
  CHECK(p.steps[0].description == "count rows where Country = Algeria.");
}

TEST_CASE("misspelled tag leaves the target unparsed") {
  const Plan p = parse_plan("Lookup the winner. [targt: Winner]", std::vector<std::string>{"Winner"});
  REQUIRE(p.steps.size() == 1);
  CHECK(p.steps[0].tool == Tool::lookup);
  CHECK_FALSE(p.steps[0].target_parsed());
}

TEST_CASE("empty and tool-free text") {
  CHECK(parse_plan("", kSchema).steps.empty());
  CHECK(parse_plan("First, think about it.\nThen answer.", kSchema).steps.empty());
}

TEST_CASE("numbered steps, cell targets and schema canonicalization") {
  const Plan p = parse_plan(
      "1. filter: keep rows where country is Algeria [target: country]\n"
      "Step 2) Lookup the score [target: Score, row 2]\n"
      "- compare the two [target: Name, row 0, Score, row 1]\n"
      "3. select [target: Name, row x]",
      kSchema);
  REQUIRE(p.steps.size() == 4);
  CHECK(p.steps[0].tool == Tool::filter);
  CHECK((*p.steps[0].target)[0].column == "Country");
  CHECK(*p.steps[1].target == std::vector<TargetRef>{{"Score", 2}});
  CHECK(*p.steps[2].target == std::vector<TargetRef>{{"Name", 0}, {"Score", 1}});
  CHECK_FALSE(p.steps[3].target_parsed());
  for (std::size_t i = 0; i < p.steps.size(); ++i) CHECK(p.steps[i].index == i);
}

TEST_CASE("render then parse is stable") {
  const Plan p = parse_plan("Filter: x [target: Country]\nLookup: y [target: Score, row 4]\nSort: z", kSchema);
  const Plan again = parse_plan(render_plan(p), kSchema);
  REQUIRE(again.steps.size() == p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) CHECK(again.steps[i] == p.steps[i]);
}

TEST_CASE("column designation sets the whole column") {
  const Table t = five_by_three();
  const Plan p = parse_plan("Aggregate: count [target: Country]", kSchema);
  const CellMask m = compile_mask(p.steps[0], t);
  CHECK(m.provenance() == MaskProvenance::parsed);
  CHECK(m.count() == 5);
  for (Eigen::Index r = 0; r < 5; ++r) CHECK(m.test(r, 1));
}

TEST_CASE("unparsed target compiles to the uniform fallback") {
  const Table t = five_by_three();
  const Plan p = parse_plan("Lookup the winner. [targt: Winner]", kSchema);
  const CellMask m = compile_mask(p.steps[0], t);
  CHECK(m.is_uniform_fallback());
  CHECK(m.count() == 15);
}

TEST_CASE("single-cell designation") {
  const Table t = five_by_three();
  const CellMask m = compile_mask(parse_plan("Lookup: s [target: Score, row 2]", kSchema).steps[0], t);
  CHECK(m.count() == 1);
  CHECK(m.test(2, 2));
}

TEST_CASE("unknown columns and out-of-range rows fall back to uniform") {
  const Table t = five_by_three();
  CHECK(compile_mask(parse_plan("Lookup: s [target: Pts]", kSchema).steps[0], t).is_uniform_fallback());
  CHECK(compile_mask(parse_plan("Lookup: s [target: Score, row 9]", kSchema).steps[0], t).is_uniform_fallback());
}

TEST_CASE("hallucination rate") {
  const Plan clean = parse_plan("Filter: a [target: Country]\nLookup: b [target: Score, row 1]", kSchema);
  const auto r0 = hallucination_rate(clean, kSchema);
  CHECK(r0.per_plan == 0.0);
  CHECK(r0.per_step == 0.0);

  const std::vector<std::string> points = {"Name", "Points"};
  const Plan half = parse_plan("Filter: a [target: Name]\nAggregate: b [target: Pts]", points);
  CHECK(hallucination_rate(half, points).per_step == doctest::Approx(0.5));
  CHECK(hallucination_rate(half, points).per_plan == doctest::Approx(0.5));

  const auto empty = hallucination_rate(Plan{}, kSchema);
  CHECK(empty.per_step == 0.0);
}

TEST_CASE("hallucination rate recovers a known injection rate") {
  std::mt19937_64 rng(9);
  constexpr int kPlans = 100;
  constexpr int kSteps = 4;
  std::vector<bool> inject(kPlans * kSteps, false);
  std::fill(inject.begin(), inject.begin() + kPlans * kSteps / 2, true);
  std::shuffle(inject.begin(), inject.end(), rng);
  double total = 0.0;
  for (int p = 0; p < kPlans; ++p) {
    std::string text;
    for (int s = 0; s < kSteps; ++s) {
      const std::string col = inject[p * kSteps + s] ? "Ghost" + std::to_string(s) : kSchema[s % 3];
      text += "Filter: step [target: " + col + "]\n";
    }
    total += hallucination_rate(parse_plan(text, kSchema), kSchema).per_step;
  }
  CHECK(total / kPlans == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("compile_mask shape always matches the table") {
  std::mt19937_64 rng(21);
  const char* tools[] = {"filter", "Sort", "AGGREGATE", "lookup", "compare", "select", "banana"};
  for (int i = 0; i < 1000; ++i) {
    const Table t = random_table(rng, {0, 8, 1, 5});
    std::uniform_int_distribution<int> pick(0, 6);
    std::uniform_int_distribution<int> col(0, static_cast<int>(t.n_cols()) + 1);
    std::uniform_int_distribution<int> row(-1, 9);
    std::string text;
    for (int s = 0; s < 3; ++s) {
      const int c = col(rng);
      const std::string name = c < static_cast<int>(t.n_cols()) ? t.columns()[c] : "missing";
      const int r = row(rng);
      text += std::string(tools[pick(rng)]) + ": do [target: " + name + (r >= 0 ? ", row " + std::to_string(r) : "") +
              (s == 2 ? "" : "]") + "\n";
    }
    const Plan p = parse_plan(text, t.columns());
    for (const auto& step : p.steps) {
      const CellMask m = compile_mask(step, t);
      REQUIRE(m.same_shape(t));
    }
  }
}

TEST_CASE("plan JSON round trip") {
  const Plan p = parse_plan("Filter: a [target: Country]\nLookup: b", kSchema);
  const Plan back = plan_from_json(plan_to_json(p));
  REQUIRE(back.steps.size() == 2);
  CHECK(back.steps[0] == p.steps[0]);
  CHECK(back.steps[1] == p.steps[1]);
}

}  // TEST_SUITE
