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

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tabground/plan.hpp"
#include "tabground/table.hpp"

namespace tabground {

enum class CompareOp { eq, ne, lt, le, gt, ge, contains };
enum class AggregateKind { sum, count, average, min, max };
enum class SortDirection { ascending, descending };

struct FilterCall {
  std::string column;
  CompareOp op = CompareOp::eq;
  std::string value;
  friend bool operator==(const FilterCall&, const FilterCall&) = default;
};

struct SortCall {
  std::string column;
  SortDirection direction = SortDirection::ascending;
  friend bool operator==(const SortCall&, const SortCall&) = default;
};

struct AggregateCall {
  AggregateKind kind = AggregateKind::count;
  std::string column;
  friend bool operator==(const AggregateCall&, const AggregateCall&) = default;
};

struct LookupCall {
  std::string column;
  std::size_t row = 0;
  friend bool operator==(const LookupCall&, const LookupCall&) = default;
};

/// A cell reference for compare. Without a row the column must hold
/// exactly one row (e.g. the output of an aggregate).
struct CellRef {
  std::string column;
  std::optional<std::size_t> row;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

struct CompareCall {
  CellRef left;
  CellRef right;
  friend bool operator==(const CompareCall&, const CompareCall&) = default;
};

struct SelectCall {
  std::vector<std::string> columns;
  friend bool operator==(const SelectCall&, const SelectCall&) = default;
};

struct FinalAnswer {
  std::string answer;
  friend bool operator==(const FinalAnswer&, const FinalAnswer&) = default;
};

/// A reasoner action. Construction validates the arguments (non-empty
/// column names; select needs a non-empty list of distinct columns) and
/// throws InvalidToolCall otherwise.
class ToolCall {
 public:
  using Args = std::variant<FilterCall, SortCall, AggregateCall, LookupCall, CompareCall, SelectCall, FinalAnswer>;

  ToolCall(Args args);  // NOLINT(google-explicit-constructor)

  /// Lets each argument struct convert directly: ToolCall c = SortCall{...};
  template <typename T>
    requires(!std::same_as<std::remove_cvref_t<T>, ToolCall> && !std::same_as<std::remove_cvref_t<T>, Args> &&
             std::constructible_from<Args, T>)
  ToolCall(T&& call) : ToolCall(Args(std::forward<T>(call))) {}  // NOLINT(google-explicit-constructor)

  const Args& args() const noexcept { return args_; }
  bool is_final() const noexcept { return std::holds_alternative<FinalAnswer>(args_); }
  /// nullopt for the final answer action.
  std::optional<Tool> tool() const noexcept;
  /// Wire name: "filter", ..., "f_final_answer".
  std::string_view name() const noexcept;

  friend bool operator==(const ToolCall&, const ToolCall&) = default;

 private:
  Args args_;
};

std::string_view to_string(CompareOp op);
std::string_view to_string(AggregateKind kind);

nlohmann::json tool_call_to_json(const ToolCall& call);
/// Accepts tool names with or without the "f_" prefix and both ASCII and
/// Unicode comparison operators. Throws InvalidToolCall.
ToolCall tool_call_from_json(const nlohmann::json& j);

struct TableState {
  Table table;
  std::size_t step_index = 0;
  std::optional<ToolCall> provenance;
};

enum class ToolErrorKind { UnknownColumn, RowOutOfRange, NonNumericAggregate, EmptyInput };
std::string_view to_string(ToolErrorKind kind);

struct ToolError {
  ToolErrorKind kind;
  std::string reason;
};

/// Result of one action. A failed tool keeps the table and still advances
/// the step index so the trajectory can continue.
struct StepOutcome {
  std::variant<TableState, std::string> next;
  std::optional<ToolError> error;

  bool ok() const noexcept { return !error; }
  bool terminal() const noexcept { return std::holds_alternative<std::string>(next); }
  const TableState& state() const { return std::get<TableState>(next); }
  const std::string& answer() const { return std::get<std::string>(next); }
};

/// Deterministic tool semantics over the current state only.
StepOutcome execute(const TableState& state, const ToolCall& call);

/// FNV-1a over the canonical serialization of the state's table.
std::uint64_t state_hash(const TableState& state);
std::uint64_t table_hash(const Table& table);

/// Numeric when both sides parse as numbers; otherwise numbers order before
/// text and text compares case-insensitively. Returns -1, 0 or 1.
int compare_values(std::string_view a, std::string_view b);

}  // namespace tabground
