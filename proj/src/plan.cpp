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

#include "tabground/plan.hpp"

#include <array>
#include <regex>

#include "tabground/text.hpp"

namespace tabground {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Tool, std::string_view>, 6> kTools{{
    {Tool::filter, "filter"},
    {Tool::sort, "sort"},
    {Tool::aggregate, "aggregate"},
    {Tool::lookup, "lookup"},
    {Tool::compare, "compare"},
    {Tool::select, "select"},
}};

const std::regex& step_pattern() {
  static const std::regex re(
      R"(^\s*(?:[-*]\s*)?(?:(?:step\s*)?\d+\s*[.):-]?\s*)?(filter|sort|aggregate|lookup|compare|select)\b\s*:?\s*(.*)$)",
      std::regex::icase | std::regex::ECMAScript);
  return re;
}

const std::regex& tag_pattern() {
  static const std::regex re(R"(\[\s*target\s*:([^\]]*)\])", std::regex::icase | std::regex::ECMAScript);
  return re;
}

const std::regex& row_pattern() {
  static const std::regex re(R"(^row\s*#?\s*(\d+)$)", std::regex::icase | std::regex::ECMAScript);
  return re;
}

std::string strip_quotes(std::string_view s) {
  s = trim(s);
  while (s.size() >= 2 && (s.front() == '"' || s.front() == '\'' || s.front() == '`') && s.back() == s.front()) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

std::optional<std::vector<TargetRef>> parse_target(std::string_view body, std::span<const std::string> schema) {
  std::vector<TargetRef> refs;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    if (comma == std::string_view::npos) comma = body.size();
    std::string piece = strip_quotes(body.substr(start, comma - start));
    start = comma + 1;

    if (piece.empty()) return std::nullopt;
    std::smatch m;
    if (std::regex_match(piece, m, row_pattern())) {
      if (refs.empty() || refs.back().row) return std::nullopt;
      try {
        refs.back().row = static_cast<std::size_t>(std::stoull(m[1].str()));
      } catch (const std::exception&) {
        return std::nullopt;
      }
      continue;
    }
    if (auto idx = resolve_column(schema, piece)) {
      piece = schema[*idx];
    } else if (to_lower(piece).starts_with("row")) {
      return std::nullopt;  // a row reference that is not a number
    }
    refs.push_back({std::move(piece), std::nullopt});
  }
  if (refs.empty()) return std::nullopt;
  return refs;
}

}  // namespace

std::string_view to_string(Tool tool) {
  for (const auto& [t, name] : kTools) {
    if (t == tool) return name;
  }
  return "unknown";
}

std::optional<Tool> tool_from_string(std::string_view name) {
  const std::string lowered = to_lower(trim(name));
  for (const auto& [t, n] : kTools) {
    if (lowered == n) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> resolve_column(std::span<const std::string> columns, std::string_view name) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  const std::string wanted = normalize_text(name);
  if (wanted.empty()) return std::nullopt;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (normalize_text(columns[i]) == wanted) return i;
  }
  return std::nullopt;
}

Plan parse_plan(std::string_view raw, std::span<const std::string> schema) {
  Plan plan;
  plan.raw_text = std::string(raw);

  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    const std::string line(raw.substr(pos, nl - pos));
    pos = nl + 1;

    std::smatch m;
    if (!std::regex_match(line, m, step_pattern())) continue;

    PlanStep step;
    step.index = plan.steps.size();
    step.tool = *tool_from_string(m[1].str());

    const std::string rest = m[2].str();
    std::optional<std::string> last_tag;
    for (auto it = std::sregex_iterator(rest.begin(), rest.end(), tag_pattern()); it != std::sregex_iterator();
         ++it) {
      last_tag = (*it)[1].str();
    }
    if (last_tag) step.target = parse_target(*last_tag, schema);
    step.description = std::string(trim(std::regex_replace(rest, tag_pattern(), "")));
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

std::string render_plan(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) {
    if (!out.empty()) out += '\n';
    std::string name(to_string(step.tool));
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    out += name;
    out += ": ";
    out += step.description;
    if (step.target) {
      out += " [target: ";
      for (std::size_t i = 0; i < step.target->size(); ++i) {
        const auto& ref = (*step.target)[i];
        if (i > 0) out += ", ";
        out += ref.column;
        if (ref.row) out += ", row " + std::to_string(*ref.row);
      }
      out += "]";
    }
  }
  return out;
}

CellMask compile_mask(const PlanStep& step, const Table& table) {
  const auto n_rows = static_cast<Eigen::Index>(table.n_rows());
  const auto n_cols = static_cast<Eigen::Index>(table.n_cols());
  if (!step.target) return CellMask::uniform(n_rows, n_cols);

  CellMask mask(n_rows, n_cols, MaskProvenance::parsed);
  for (const auto& ref : *step.target) {
    auto col = resolve_column(table.columns(), ref.column);
    if (!col) return CellMask::uniform(n_rows, n_cols);
    const auto c = static_cast<Eigen::Index>(*col);
    if (ref.row) {
      if (*ref.row >= table.n_rows()) return CellMask::uniform(n_rows, n_cols);
      mask.set(static_cast<Eigen::Index>(*ref.row), c);
    } else {
      for (Eigen::Index r = 0; r < n_rows; ++r) mask.set(r, c);
    }
  }
  return mask;
}

HallucinationRate hallucination_rate(const Plan& plan, std::span<const std::string> schema) {
  if (plan.steps.empty()) return {};
  std::size_t bad_steps = 0;
  std::size_t names = 0;
  std::size_t bad_names = 0;
  for (const auto& step : plan.steps) {
    if (!step.target) {
      ++bad_steps;
      continue;
    }
    bool step_bad = false;
    for (const auto& ref : *step.target) {
      ++names;
      if (!resolve_column(schema, ref.column)) {
        ++bad_names;
        step_bad = true;
      }
    }
    if (step_bad) ++bad_steps;
  }
  HallucinationRate rate;
  rate.per_step = static_cast<double>(bad_steps) / static_cast<double>(plan.steps.size());
  rate.per_plan = names == 0 ? 0.0 : static_cast<double>(bad_names) / static_cast<double>(names);
  return rate;
}

json plan_to_json(const Plan& plan) {
  json steps = json::array();
  for (const auto& step : plan.steps) {
    json target = nullptr;
    if (step.target) {
      target = json::array();
      for (const auto& ref : *step.target) {
        target.push_back({{"column", ref.column}, {"row", ref.row ? json(*ref.row) : json(nullptr)}});
      }
    }
    steps.push_back({{"tool", to_string(step.tool)}, {"description", step.description}, {"target", target}});
  }
  return json{{"steps", steps}, {"raw_text", plan.raw_text}};
}

Plan plan_from_json(const json& j) {
  try {
    Plan plan;
    plan.raw_text = j.value("raw_text", std::string{});
    for (const auto& s : j.at("steps")) {
      PlanStep step;
      step.index = plan.steps.size();
      auto tool = tool_from_string(s.at("tool").get<std::string>());
      if (!tool) throw FormatError("unknown tool '" + s.at("tool").get<std::string>() + "'");
      step.tool = *tool;
      step.description = s.value("description", std::string{});
      if (s.contains("target") && !s.at("target").is_null()) {
        std::vector<TargetRef> refs;
        for (const auto& t : s.at("target")) {
          TargetRef ref{t.at("column").get<std::string>(), std::nullopt};
          if (t.contains("row") && !t.at("row").is_null()) ref.row = t.at("row").get<std::size_t>();
          refs.push_back(std::move(ref));
        }
        if (refs.empty()) throw FormatError("target list must be non-empty or null");
        step.target = std::move(refs);
      }
      plan.steps.push_back(std::move(step));
    }
    return plan;
  } catch (const json::exception& e) {
    throw FormatError(std::string("plan: ") + e.what());
  }
}

}  // namespace tabground
