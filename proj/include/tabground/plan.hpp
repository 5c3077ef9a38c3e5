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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabground/table.hpp"

namespace tabground {

/// Closed planning vocabulary.
enum class Tool { filter, sort, aggregate, lookup, compare, select };

std::string_view to_string(Tool tool);
std::optional<Tool> tool_from_string(std::string_view name);

/// One designation inside a `[target: ...]` tag: a whole column, or a single
/// cell when `row` (0-based) is present.
struct TargetRef {
  std::string column;
  std::optional<std::size_t> row;
  friend bool operator==(const TargetRef&, const TargetRef&) = default;
};

struct PlanStep {
  std::size_t index = 0;
  Tool tool = Tool::filter;
  std::string description;
  /// nullopt means the tag was missing or unparseable.
  std::optional<std::vector<TargetRef>> target;

  bool target_parsed() const noexcept { return target.has_value(); }
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  std::string raw_text;
};

/// Every line whose start (optionally after a bullet or step number) is a
/// tool keyword becomes a step. Recognized tags:
///   [target: Col]            whole column
///   [target: Col, row N]     single cell
///   [target: A, B, row 2]    several designations, `row` binds to the
///                            column before it
/// Column names matching the schema up to case and whitespace are rewritten
/// to the schema spelling. Never throws.
Plan parse_plan(std::string_view raw, std::span<const std::string> schema);

/// Renders one line per step in the grammar parse_plan reads.
std::string render_plan(const Plan& plan);

/// Case- and whitespace-insensitive column lookup; exact matches win.
std::optional<std::size_t> resolve_column(std::span<const std::string> columns, std::string_view name);

/// Never throws. Unparsed targets, unknown columns and out-of-range rows all
/// yield CellMask::uniform for the table's shape.
CellMask compile_mask(const PlanStep& step, const Table& table);

struct HallucinationRate {
  double per_plan = 0.0;  ///< fraction of referenced column names not in the schema
  double per_step = 0.0;  ///< fraction of steps with an off-schema or unparsed target
};

HallucinationRate hallucination_rate(const Plan& plan, std::span<const std::string> schema);

nlohmann::json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);

}  // namespace tabground
