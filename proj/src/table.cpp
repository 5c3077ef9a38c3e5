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

#include "tabground/table.hpp"

#include <algorithm>
#include <unordered_set>

namespace tabground {

Table::Table(std::vector<std::string> columns, std::vector<Row> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
  if (columns_.empty()) throw InvalidTable("table has no columns");
  std::unordered_set<std::string_view> seen;
  for (const auto& name : columns_) {
    if (name.empty()) throw InvalidTable("empty column name");
    if (!seen.insert(name).second) throw InvalidTable("duplicate column name '" + name + "'");
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != columns_.size()) {
      throw InvalidTable("row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                         " cells, expected " + std::to_string(columns_.size()));
    }
  }
}

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

std::string_view to_string(MaskProvenance p) {
  switch (p) {
    case MaskProvenance::parsed: return "parsed";
    case MaskProvenance::uniform_fallback: return "uniform_fallback";
    case MaskProvenance::oracle: return "oracle";
    case MaskProvenance::noised: return "noised";
    case MaskProvenance::null_shuffled: return "null_shuffled";
  }
  return "unknown";
}

CellMask::CellMask(Eigen::Index rows, Eigen::Index cols, MaskProvenance provenance)
    : bits_(MaskBits::Zero(rows, cols)), provenance_(provenance) {}

CellMask::CellMask(MaskBits bits, MaskProvenance provenance)
    : bits_(std::move(bits)), provenance_(provenance) {
  bits_ = bits_.unaryExpr([](std::uint8_t b) -> std::uint8_t { return b != 0 ? 1 : 0; });
}

CellMask CellMask::uniform(Eigen::Index rows, Eigen::Index cols) {
  return CellMask(MaskBits::Ones(rows, cols), MaskProvenance::uniform_fallback);
}

bool CellMask::column_designated(Eigen::Index c) const {
  if (rows() == 0) return is_uniform_fallback();
  return (bits_.col(c).array() != 0).any();
}

SpanIndex::SpanIndex(std::size_t n_rows, std::size_t n_cols, std::vector<Entry> entries,
                     std::size_t total_length)
    : n_rows_(n_rows), n_cols_(n_cols), entries_(std::move(entries)), total_length_(total_length) {}

namespace {

constexpr std::string_view kSeparatorCell = "---";

void append_escaped(std::string& out, std::string_view cell) {
  for (char ch : cell) {
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\|"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(ch);
    }
  }
}

std::string unescape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size()) {
      char next = raw[i + 1];
      if (next == '\\' || next == '|') {
        out.push_back(next);
        ++i;
        continue;
      }
      if (next == 'n' || next == 'r') {
        out.push_back(next == 'n' ? '\n' : '\r');
        ++i;
        continue;
      }
    }
    out.push_back(raw[i]);
  }
  return out;
}

// Splits "| a | b |" on unescaped pipes; strips one pad space on each side.
std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty() || line.front() != '|') throw MalformedTable(line_no, "row must start with '|'");

  std::vector<std::string> cells;
  std::size_t start = 1;
  bool closed = false;
  for (std::size_t i = 1; i < line.size(); ++i) {
    if (line[i] == '\\') {
      ++i;
      continue;
    }
    if (line[i] != '|') continue;
    std::string_view raw = line.substr(start, i - start);
    if (!raw.empty() && raw.front() == ' ') raw.remove_prefix(1);
    if (!raw.empty() && raw.back() == ' ') raw.remove_suffix(1);
    cells.push_back(unescape(raw));
    start = i + 1;
    closed = (i + 1 == line.size());
  }
  if (!closed) throw MalformedTable(line_no, "row must end with '|'");
  return cells;
}

}  // namespace

Serialized serialize(const Table& table) {
  const std::size_t n_cols = table.n_cols();
  std::vector<SpanIndex::Entry> entries;
  entries.reserve(n_cols * (table.n_rows() + 1));
  std::string text;

  auto emit_row = [&](const Row& cells, std::optional<std::size_t> row) {
    text += "|";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      text += " ";
      const std::size_t begin = text.size();
      append_escaped(text, cells[c]);
      entries.push_back({CharSpan{begin, text.size()}, row, c});
      text += " |";
    }
  };

  emit_row(table.columns(), std::nullopt);
  text += "\n|";
  for (std::size_t c = 0; c < n_cols; ++c) {
    text += " ";
    text += kSeparatorCell;
    text += " |";
  }
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    text += "\n";
    emit_row(table.rows()[r], r);
  }
  const std::size_t total = text.size();
  return {std::move(text), SpanIndex(table.n_rows(), n_cols, std::move(entries), total)};
}

Table parse_table(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw MalformedTable(1, "missing header row");
  if (lines.size() < 2) throw MalformedTable(2, "missing separator line");

  std::vector<std::string> header = split_line(lines[0], 1);
  std::unordered_set<std::string_view> seen;
  for (const auto& name : header) {
    if (name.empty()) throw MalformedTable(1, "empty column name");
    if (!seen.insert(name).second) throw MalformedTable(1, "duplicate column name '" + name + "'");
  }

  std::vector<std::string> sep = split_line(lines[1], 2);
  if (sep.size() != header.size()) throw MalformedTable(2, "separator width differs from header");
  for (const auto& s : sep) {
    if (s.size() < 3 || s.find_first_not_of('-') != std::string::npos) {
      throw MalformedTable(2, "separator cells must be dashes");
    }
  }

  std::vector<Row> rows;
  rows.reserve(lines.size() - 2);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    Row row = split_line(lines[i], i + 1);
    if (row.size() != header.size()) {
      throw MalformedTable(i + 1, "ragged row: " + std::to_string(row.size()) + " cells under " +
                                      std::to_string(header.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return Table(std::move(header), std::move(rows));
}

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inverse(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || inverse[perm[i]] != perm.size()) {
      throw InvalidPermutation("not a bijection on [0, " + std::to_string(perm.size()) + ")");
    }
    inverse[perm[i]] = i;
  }
  return inverse;
}

std::pair<Table, CellMask> permute_rows(const Table& table, const CellMask& mask,
                                        std::span<const std::size_t> perm) {
  if (!mask.same_shape(table)) throw ShapeMismatch("mask shape does not match table");
  if (perm.size() != table.n_rows()) {
    throw InvalidPermutation("permutation has " + std::to_string(perm.size()) + " entries for " +
                             std::to_string(table.n_rows()) + " rows");
  }
  invert_permutation(perm);

  std::vector<Row> rows;
  rows.reserve(perm.size());
  MaskBits bits(mask.rows(), mask.cols());
  for (std::size_t r = 0; r < perm.size(); ++r) {
    rows.push_back(table.rows()[perm[r]]);
    bits.row(static_cast<Eigen::Index>(r)) = mask.bits().row(static_cast<Eigen::Index>(perm[r]));
  }
  return {Table(table.columns(), std::move(rows)), CellMask(std::move(bits), mask.provenance())};
}

}  // namespace tabground
