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

#include "tabground/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "tabground/text.hpp"

namespace tabground {

using nlohmann::json;

namespace {

void require_column(const std::string& column, std::string_view what) {
  if (trim(column).empty()) throw InvalidToolCall(std::string(what) + ": column name is empty");
}

struct Validator {
  void operator()(const FilterCall& c) const { require_column(c.column, "filter"); }
  void operator()(const SortCall& c) const { require_column(c.column, "sort"); }
  void operator()(const AggregateCall& c) const { require_column(c.column, "aggregate"); }
  void operator()(const LookupCall& c) const { require_column(c.column, "lookup"); }
  void operator()(const CompareCall& c) const {
    require_column(c.left.column, "compare");
    require_column(c.right.column, "compare");
  }
  void operator()(const SelectCall& c) const {
    if (c.columns.empty()) throw InvalidToolCall("select: empty column list");
    std::unordered_set<std::string> seen;
    for (const auto& col : c.columns) {
      require_column(col, "select");
      if (!seen.insert(col).second) throw InvalidToolCall("select: duplicate column '" + col + "'");
    }
  }
  void operator()(const FinalAnswer&) const {}
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::pair<CompareOp, std::string_view> kOps[] = {
    {CompareOp::eq, "="},  {CompareOp::ne, "!="}, {CompareOp::lt, "<"},        {CompareOp::le, "<="},
    {CompareOp::gt, ">"},  {CompareOp::ge, ">="}, {CompareOp::contains, "contains"},
};

constexpr std::pair<std::string_view, CompareOp> kOpAliases[] = {
    {"==", CompareOp::eq}, {"\xE2\x89\xA0", CompareOp::ne}, {"<>", CompareOp::ne},
    {"\xE2\x89\xA4", CompareOp::le}, {"\xE2\x89\xA5", CompareOp::ge},
};

constexpr std::pair<AggregateKind, std::string_view> kAggregates[] = {
    {AggregateKind::sum, "sum"}, {AggregateKind::count, "count"}, {AggregateKind::average, "average"},
    {AggregateKind::min, "min"}, {AggregateKind::max, "max"},
};

CompareOp op_from_string(std::string_view s) {
  const std::string lowered = to_lower(trim(s));
  for (const auto& [op, name] : kOps) {
    if (lowered == name) return op;
  }
  for (const auto& [name, op] : kOpAliases) {
    if (lowered == name) return op;
  }
  throw InvalidToolCall("unknown comparison operator '" + std::string(s) + "'");
}

AggregateKind aggregate_from_string(std::string_view s) {
  const std::string lowered = to_lower(trim(s));
  for (const auto& [kind, name] : kAggregates) {
    if (lowered == name) return kind;
  }
  if (lowered == "avg" || lowered == "mean") return AggregateKind::average;
  throw InvalidToolCall("unknown aggregate '" + std::string(s) + "'");
}

json cell_ref_to_json(const CellRef& ref) {
  return {{"column", ref.column}, {"row", ref.row ? json(*ref.row) : json(nullptr)}};
}

CellRef cell_ref_from_json(const json& j) {
  CellRef ref{j.at("column").get<std::string>(), std::nullopt};
  if (j.contains("row") && !j.at("row").is_null()) ref.row = j.at("row").get<std::size_t>();
  return ref;
}

bool satisfies(std::string_view cell, CompareOp op, std::string_view literal) {
  if (op == CompareOp::contains) return normalize_text(cell).find(normalize_text(literal)) != std::string::npos;
  const int cmp = compare_values(cell, literal);
  switch (op) {
    case CompareOp::eq: return cmp == 0;
    case CompareOp::ne: return cmp != 0;
    case CompareOp::lt: return cmp < 0;
    case CompareOp::le: return cmp <= 0;
    case CompareOp::gt: return cmp > 0;
    case CompareOp::ge: return cmp >= 0;
    case CompareOp::contains: break;
  }
  return false;
}

StepOutcome fail(const TableState& state, const ToolCall& call, ToolErrorKind kind, std::string reason) {
  return StepOutcome{TableState{state.table, state.step_index + 1, call}, ToolError{kind, std::move(reason)}};
}

StepOutcome advance(const TableState& state, const ToolCall& call, Table table) {
  return StepOutcome{TableState{std::move(table), state.step_index + 1, call}, std::nullopt};
}

Table single_cell(std::string column, std::string value) {
  return Table({std::move(column)}, {Row{std::move(value)}});
}

}  // namespace

ToolCall::ToolCall(Args args) : args_(std::move(args)) { std::visit(Validator{}, args_); }

std::optional<Tool> ToolCall::tool() const noexcept {
  return std::visit(Overloaded{
                        [](const FilterCall&) -> std::optional<Tool> { return Tool::filter; },
                        [](const SortCall&) -> std::optional<Tool> { return Tool::sort; },
                        [](const AggregateCall&) -> std::optional<Tool> { return Tool::aggregate; },
                        [](const LookupCall&) -> std::optional<Tool> { return Tool::lookup; },
                        [](const CompareCall&) -> std::optional<Tool> { return Tool::compare; },
                        [](const SelectCall&) -> std::optional<Tool> { return Tool::select; },
                        [](const FinalAnswer&) -> std::optional<Tool> { return std::nullopt; },
                    },
                    args_);
}

std::string_view ToolCall::name() const noexcept {
  if (auto t = tool()) return to_string(*t);
  return "f_final_answer";
}

std::string_view to_string(CompareOp op) {
  for (const auto& [o, name] : kOps) {
    if (o == op) return name;
  }
  return "?";
}

std::string_view to_string(AggregateKind kind) {
  for (const auto& [k, name] : kAggregates) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view to_string(ToolErrorKind kind) {
  switch (kind) {
    case ToolErrorKind::UnknownColumn: return "UnknownColumn";
    case ToolErrorKind::RowOutOfRange: return "RowOutOfRange";
    case ToolErrorKind::NonNumericAggregate: return "NonNumericAggregate";
    case ToolErrorKind::EmptyInput: return "EmptyInput";
  }
  return "?";
}

json tool_call_to_json(const ToolCall& call) {
  json args = std::visit(
      Overloaded{
          [](const FilterCall& c) -> json {
            return {{"column", c.column}, {"op", to_string(c.op)}, {"value", c.value}};
          },
          [](const SortCall& c) -> json {
            return {{"column", c.column}, {"direction", c.direction == SortDirection::ascending ? "asc" : "desc"}};
          },
          [](const AggregateCall& c) -> json { return {{"kind", to_string(c.kind)}, {"column", c.column}}; },
          [](const LookupCall& c) -> json { return {{"column", c.column}, {"row", c.row}}; },
          [](const CompareCall& c) -> json {
            return {{"left", cell_ref_to_json(c.left)}, {"right", cell_ref_to_json(c.right)}};
          },
          [](const SelectCall& c) -> json { return {{"columns", c.columns}}; },
          [](const FinalAnswer& c) -> json { return {{"answer", c.answer}}; },
      },
      call.args());
  return json{{"tool", call.name()}, {"args", std::move(args)}};
}

ToolCall tool_call_from_json(const json& j) {
  try {
    std::string name = to_lower(trim(j.at("tool").get<std::string>()));
    if (name.starts_with("f_")) name = name.substr(2);
    const json& a = j.contains("args") ? j.at("args") : json::object();

    if (name == "final_answer") {
      const json& v = a.at("answer");
      return ToolCall(FinalAnswer{v.is_string() ? v.get<std::string>() : v.dump()});
    }
    if (name == "filter") {
      const json& v = a.at("value");
      return ToolCall(FilterCall{a.at("column").get<std::string>(), op_from_string(a.value("op", std::string("="))),
                                 v.is_string() ? v.get<std::string>() : v.dump()});
    }
    if (name == "sort") {
      const std::string dir = to_lower(a.value("direction", std::string("asc")));
      SortDirection d = SortDirection::ascending;
      if (dir == "desc" || dir == "descending") {
        d = SortDirection::descending;
      } else if (dir != "asc" && dir != "ascending") {
        throw InvalidToolCall("sort: unknown direction '" + dir + "'");
      }
      return ToolCall(SortCall{a.at("column").get<std::string>(), d});
    }
    if (name == "aggregate") {
      return ToolCall(AggregateCall{aggregate_from_string(a.at("kind").get<std::string>()),
                                    a.at("column").get<std::string>()});
    }
    if (name == "lookup") {
      return ToolCall(LookupCall{a.at("column").get<std::string>(), a.at("row").get<std::size_t>()});
    }
    if (name == "compare") {
      return ToolCall(CompareCall{cell_ref_from_json(a.at("left")), cell_ref_from_json(a.at("right"))});
    }
    if (name == "select") {
      return ToolCall(SelectCall{a.at("columns").get<std::vector<std::string>>()});
    }
    throw InvalidToolCall("unknown tool '" + name + "'");
  } catch (const json::exception& e) {
    throw InvalidToolCall(std::string("malformed tool call: ") + e.what());
  }
}

int compare_values(std::string_view a, std::string_view b) {
  const auto na = parse_number(a);
  const auto nb = parse_number(b);
  if (na && nb) return *na < *nb ? -1 : (*na > *nb ? 1 : 0);
  if (na) return -1;
  if (nb) return 1;
  const std::string la = normalize_text(a);
  const std::string lb = normalize_text(b);
  const int c = la.compare(lb);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

StepOutcome execute(const TableState& state, const ToolCall& call) {
  const Table& table = state.table;
  auto column = [&](const std::string& name) { return resolve_column(table.columns(), name); };
  auto unknown = [&](const std::string& name) {
    return fail(state, call, ToolErrorKind::UnknownColumn, "no column '" + name + "'");
  };

  return std::visit(
      Overloaded{
          [&](const FilterCall& c) -> StepOutcome {
            auto col = column(c.column);
            if (!col) return unknown(c.column);
            std::vector<Row> kept;
            for (const auto& row : table.rows()) {
              if (satisfies(row[*col], c.op, c.value)) kept.push_back(row);
            }
            return advance(state, call, Table(table.columns(), std::move(kept)));
          },
          [&](const SortCall& c) -> StepOutcome {
            auto col = column(c.column);
            if (!col) return unknown(c.column);
            std::vector<Row> rows = table.rows();
            const bool desc = c.direction == SortDirection::descending;
            std::stable_sort(rows.begin(), rows.end(), [&](const Row& x, const Row& y) {
              const int cmp = compare_values(x[*col], y[*col]);
              return desc ? cmp > 0 : cmp < 0;
            });
            return advance(state, call, Table(table.columns(), std::move(rows)));
          },
          [&](const AggregateCall& c) -> StepOutcome {
            auto col = column(c.column);
            if (!col) return unknown(c.column);
            const std::string out_name =
                std::string(to_string(c.kind)) + "(" + table.columns()[*col] + ")";
            if (c.kind == AggregateKind::count) {
              std::size_t n = 0;
              for (const auto& row : table.rows()) n += trim(row[*col]).empty() ? 0 : 1;
              return advance(state, call, single_cell(out_name, std::to_string(n)));
            }
            if (table.n_rows() == 0 && c.kind != AggregateKind::sum) {
              return fail(state, call, ToolErrorKind::EmptyInput,
                          std::string(to_string(c.kind)) + " over an empty table");
            }
            std::vector<double> values;
            for (const auto& row : table.rows()) {
              if (auto v = parse_number(row[*col])) values.push_back(*v);
            }
            if (values.empty() && table.n_rows() > 0) {
              return fail(state, call, ToolErrorKind::NonNumericAggregate,
                          "no numeric cells in column '" + table.columns()[*col] + "'");
            }
            double result = 0.0;
            switch (c.kind) {
              case AggregateKind::sum: result = std::accumulate(values.begin(), values.end(), 0.0); break;
              case AggregateKind::average:
                result = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
                break;
              case AggregateKind::min: result = *std::min_element(values.begin(), values.end()); break;
              case AggregateKind::max: result = *std::max_element(values.begin(), values.end()); break;
              case AggregateKind::count: break;
            }
            return advance(state, call, single_cell(out_name, format_number(result)));
          },
          [&](const LookupCall& c) -> StepOutcome {
            auto col = column(c.column);
            if (!col) return unknown(c.column);
            if (c.row >= table.n_rows()) {
              return fail(state, call, ToolErrorKind::RowOutOfRange,
                          "row " + std::to_string(c.row) + " of " + std::to_string(table.n_rows()));
            }
            return advance(state, call, single_cell(table.columns()[*col], table.cell(c.row, *col)));
          },
          [&](const CompareCall& c) -> StepOutcome {
            const std::string* values[2] = {nullptr, nullptr};
            const CellRef* refs[2] = {&c.left, &c.right};
            for (int i = 0; i < 2; ++i) {
              auto col = column(refs[i]->column);
              if (!col) return unknown(refs[i]->column);
              std::size_t row = 0;
              if (refs[i]->row) {
                row = *refs[i]->row;
              } else if (table.n_rows() != 1) {
                return fail(state, call, ToolErrorKind::RowOutOfRange,
                            "compare without a row needs a single-row table");
              }
              if (row >= table.n_rows()) {
                return fail(state, call, ToolErrorKind::RowOutOfRange,
                            "row " + std::to_string(row) + " of " + std::to_string(table.n_rows()));
              }
              values[i] = &table.cell(row, *col);
            }
            const int cmp = compare_values(*values[0], *values[1]);
            return advance(state, call, single_cell("compare", cmp < 0 ? "lt" : (cmp > 0 ? "gt" : "eq")));
          },
          [&](const SelectCall& c) -> StepOutcome {
            std::vector<std::size_t> idx;
            std::vector<std::string> names;
            for (const auto& name : c.columns) {
              auto col = column(name);
              if (!col) return unknown(name);
              if (std::find(idx.begin(), idx.end(), *col) != idx.end()) continue;
              idx.push_back(*col);
              names.push_back(table.columns()[*col]);
            }
            std::vector<Row> rows;
            rows.reserve(table.n_rows());
            for (const auto& row : table.rows()) {
              Row projected;
              projected.reserve(idx.size());
              for (auto i : idx) projected.push_back(row[i]);
              rows.push_back(std::move(projected));
            }
            return advance(state, call, Table(std::move(names), std::move(rows)));
          },
          [&](const FinalAnswer& c) -> StepOutcome { return StepOutcome{c.answer, std::nullopt}; },
      },
      call.args());
}

std::uint64_t table_hash(const Table& table) { return fnv1a64(serialize(table).text); }

std::uint64_t state_hash(const TableState& state) { return table_hash(state.table); }

}  // namespace tabground
