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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tabground/error.hpp"

namespace tabground {

using Row = std::vector<std::string>;

/// Rectangular table of raw cell text. Numeric cells keep their literal
/// spelling ("1,234", "12.5%"); interpretation happens at use sites.
///
/// Invariants (checked on construction, throws InvalidTable):
///   * at least one column, every column name non-empty and unique
///   * every row has exactly n_cols() cells
/// Zero rows is legal.
class Table {
 public:
  Table(std::vector<std::string> columns, std::vector<Row> rows = {});

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::size_t n_rows() const noexcept { return rows_.size(); }
  std::size_t n_cols() const noexcept { return columns_.size(); }
  const std::string& cell(std::size_t r, std::size_t c) const { return rows_.at(r).at(c); }

  /// Exact-name lookup.
  std::optional<std::size_t> column_index(std::string_view name) const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

enum class MaskProvenance { parsed, uniform_fallback, oracle, noised, null_shuffled };

std::string_view to_string(MaskProvenance p);

using MaskBits = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary designation over the data cells of a table. Header cells are not
/// part of the mask; a column counts as designated when any of its cells is.
class CellMask {
 public:
  CellMask() = default;
  CellMask(Eigen::Index rows, Eigen::Index cols, MaskProvenance provenance = MaskProvenance::parsed);
  CellMask(MaskBits bits, MaskProvenance provenance);

  /// All-ones mask tagged as the uniform fallback.
  static CellMask uniform(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const noexcept { return bits_.rows(); }
  Eigen::Index cols() const noexcept { return bits_.cols(); }
  const MaskBits& bits() const noexcept { return bits_; }
  bool test(Eigen::Index r, Eigen::Index c) const { return bits_(r, c) != 0; }
  void set(Eigen::Index r, Eigen::Index c, bool on = true) { bits_(r, c) = on ? 1 : 0; }
  Eigen::Index count() const { return bits_.cast<Eigen::Index>().sum(); }
  bool column_designated(Eigen::Index c) const;

  MaskProvenance provenance() const noexcept { return provenance_; }
  void set_provenance(MaskProvenance p) noexcept { provenance_ = p; }
  bool is_uniform_fallback() const noexcept { return provenance_ == MaskProvenance::uniform_fallback; }

  bool same_shape(const Table& t) const noexcept {
    return rows() == static_cast<Eigen::Index>(t.n_rows()) && cols() == static_cast<Eigen::Index>(t.n_cols());
  }

  friend bool operator==(const CellMask& a, const CellMask& b) {
    return a.provenance_ == b.provenance_ && a.bits_.rows() == b.bits_.rows() &&
           a.bits_.cols() == b.bits_.cols() && a.bits_ == b.bits_;
  }

 private:
  MaskBits bits_;
  MaskProvenance provenance_ = MaskProvenance::parsed;
};

/// Half-open character range [begin, end) in the serialized text.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

/// Location of every header and data cell inside a serialization.
/// Entries are stored in document order: the n_cols headers first, then data
/// cells row-major. Headers use `row == std::nullopt`.
class SpanIndex {
 public:
  struct Entry {
    CharSpan span;
    std::optional<std::size_t> row;
    std::size_t col = 0;
  };

  SpanIndex() = default;
  SpanIndex(std::size_t n_rows, std::size_t n_cols, std::vector<Entry> entries, std::size_t total_length);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t total_length() const noexcept { return total_length_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t cell_entry_count() const noexcept { return n_rows_ * n_cols_; }

  const CharSpan& header(std::size_t c) const { return entries_.at(c).span; }
  const CharSpan& cell(std::size_t r, std::size_t c) const { return entries_.at(n_cols_ + r * n_cols_ + c).span; }
  std::span<const Entry> entries() const noexcept { return entries_; }

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<Entry> entries_;
  std::size_t total_length_ = 0;
};

struct Serialized {
  std::string text;
  SpanIndex index;
};

/// Canonical pipe-delimited rendering:
///
///   | A | B |
///   | --- | --- |
///   | x | y |
///
/// Lines are joined by '\n' with no trailing newline. Inside cells, '\\', '|',
/// newline and carriage return are escaped as \\, \|, \n, \r.
Serialized serialize(const Table& table);

/// Inverse of serialize. Throws MalformedTable on ragged rows, duplicate or
/// empty headers, or a missing separator line.
Table parse_table(std::string_view text);

/// Row r of the result is row perm[r] of the input, for both table and mask.
/// Throws InvalidPermutation unless perm is a bijection on [0, n_rows), and
/// ShapeMismatch when the mask does not annotate the table.
std::pair<Table, CellMask> permute_rows(const Table& table, const CellMask& mask,
                                        std::span<const std::size_t> perm);

/// perm^-1, validated the same way as permute_rows.
std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm);

}  // namespace tabground
