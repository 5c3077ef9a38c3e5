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

#include "tabground/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tabground {

using nlohmann::json;

CellAggregation aggregate_cells_detailed(std::span<const TokenScore> tokens, const SpanIndex& index) {
  const auto n_rows = static_cast<Eigen::Index>(index.n_rows());
  const auto n_cols = static_cast<Eigen::Index>(index.n_cols());
  CellAggregation out{CellAttention::zeros(n_rows, n_cols), 0.0};
  const auto entries = index.entries();

  for (const auto& token : tokens) {
    if (token.range.end < token.range.begin || token.range.end > index.total_length()) {
      throw RangeOutOfBounds("token range [" + std::to_string(token.range.begin) + ", " +
                             std::to_string(token.range.end) + ") outside text of length " +
                             std::to_string(index.total_length()));
    }
    if (!(token.score >= 0.0) || !std::isfinite(token.score)) {
      throw InvalidArgument("token scores must be finite and nonnegative");
    }
    // Entries are disjoint and in document order, so their ends are sorted.
    auto first = std::upper_bound(entries.begin(), entries.end(), token.range.begin,
                                  [](std::size_t pos, const SpanIndex::Entry& e) { return pos < e.span.end; });
    std::size_t covered = 0;
    for (auto it = first; it != entries.end() && it->span.begin < token.range.end; ++it) {
      covered += std::min(it->span.end, token.range.end) - std::max(it->span.begin, token.range.begin);
    }
    if (covered == 0) {
      out.discarded += token.score;
      continue;
    }
    for (auto it = first; it != entries.end() && it->span.begin < token.range.end; ++it) {
      const std::size_t overlap = std::min(it->span.end, token.range.end) - std::max(it->span.begin, token.range.begin);
      if (overlap == 0) continue;
      const double share = token.score * static_cast<double>(overlap) / static_cast<double>(covered);
      const auto c = static_cast<Eigen::Index>(it->col);
      if (it->row) {
        out.attention.scores(static_cast<Eigen::Index>(*it->row), c) += share;
      } else {
        out.attention.header_scores(c) += share;
      }
    }
  }
  return out;
}

CellAttention aggregate_cells(std::span<const TokenScore> tokens, const SpanIndex& index) {
  return aggregate_cells_detailed(tokens, index).attention;
}

CellAttention attention_from_json(const json& j, const SpanIndex& index) {
  try {
    if (j.contains("spans")) {
      std::vector<TokenScore> tokens;
      for (const auto& s : j.at("spans")) {
        const auto start = s.at("start").get<long long>();
        const auto end = s.at("end").get<long long>();
        if (start < 0 || end < 0) throw RangeOutOfBounds("negative span offset");
        tokens.push_back({CharSpan{static_cast<std::size_t>(start), static_cast<std::size_t>(end)},
                          s.at("score").get<double>()});
      }
      return aggregate_cells(tokens, index);
    }

    const auto& cells = j.at("per_cell");
    const auto n_rows = static_cast<Eigen::Index>(index.n_rows());
    const auto n_cols = static_cast<Eigen::Index>(index.n_cols());
    if (static_cast<Eigen::Index>(cells.size()) != n_rows) {
      throw ShapeMismatch("per_cell has " + std::to_string(cells.size()) + " rows, table has " +
                          std::to_string(n_rows));
    }
    CellAttention attn = CellAttention::zeros(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      const auto& row = cells[static_cast<std::size_t>(r)];
      if (static_cast<Eigen::Index>(row.size()) != n_cols) throw ShapeMismatch("per_cell row width mismatch");
      for (Eigen::Index c = 0; c < n_cols; ++c) attn.scores(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    if (j.contains("per_header") && !j.at("per_header").is_null()) {
      const auto& headers = j.at("per_header");
      if (static_cast<Eigen::Index>(headers.size()) != n_cols) throw ShapeMismatch("per_header width mismatch");
      for (Eigen::Index c = 0; c < n_cols; ++c) attn.header_scores(c) = headers[static_cast<std::size_t>(c)].get<double>();
    }
    attn.validate();
    return attn;
  } catch (const json::exception& e) {
    throw FormatError(std::string("attention payload: ") + e.what());
  }
}

json attention_to_json(const CellAttention& attn) {
  json cells = json::array();
  for (Eigen::Index r = 0; r < attn.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < attn.cols(); ++c) row.push_back(attn.scores(r, c));
    cells.push_back(std::move(row));
  }
  json headers = json::array();
  for (Eigen::Index c = 0; c < attn.header_scores.size(); ++c) headers.push_back(attn.header_scores(c));
  return json{{"per_cell", std::move(cells)}, {"per_header", std::move(headers)}};
}

}  // namespace tabground
