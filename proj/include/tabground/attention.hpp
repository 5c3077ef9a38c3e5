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

#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tabground/table.hpp"

namespace tabground {

/// Per-cell attention mass over a serialized table. Header mass is kept
/// per column, separately from the data cells.
template <typename Scalar>
struct BasicCellAttention {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix scores;
  Vector header_scores;

  static BasicCellAttention zeros(Eigen::Index rows, Eigen::Index cols) {
    return {Matrix::Zero(rows, cols), Vector::Zero(cols)};
  }

  Eigen::Index rows() const noexcept { return scores.rows(); }
  Eigen::Index cols() const noexcept { return scores.cols(); }
  Scalar total_mass() const { return scores.sum() + header_scores.sum(); }

  bool same_shape(const CellMask& m) const noexcept { return rows() == m.rows() && cols() == m.cols(); }

  /// Throws ShapeMismatch or InvalidArgument (negative or non-finite mass).
  void validate() const {
    if (header_scores.size() != scores.cols()) throw ShapeMismatch("header scores do not match column count");
    if (!scores.allFinite() || !header_scores.allFinite()) throw InvalidArgument("attention must be finite");
    if ((scores.array() < Scalar(0)).any() || (header_scores.array() < Scalar(0)).any()) {
      throw InvalidArgument("attention must be nonnegative");
    }
  }

  template <typename Other>
  BasicCellAttention<Other> cast() const {
    return {scores.template cast<Other>(), header_scores.template cast<Other>()};
  }
};

using CellAttention = BasicCellAttention<double>;

/// Token-level attention keyed by a character range of the serialization.
struct TokenScore {
  CharSpan range;
  double score = 0.0;
};

struct CellAggregation {
  CellAttention attention;
  double discarded = 0.0;  ///< mass that fell on delimiters and padding
};

/// Spreads each token's score over the header and cell spans it overlaps, in
/// proportion to the characters it shares with each. A token touching no span
/// (delimiters, padding) is discarded whole. Throws RangeOutOfBounds for ranges past the
/// end of the text or with end < begin, InvalidArgument for negative scores.
CellAggregation aggregate_cells_detailed(std::span<const TokenScore> tokens, const SpanIndex& index);
CellAttention aggregate_cells(std::span<const TokenScore> tokens, const SpanIndex& index);

struct RAttnOptions {
  double epsilon = 1e-6;
  /// Credit a column's header mass to the numerator when the mask
  /// designates any cell of that column.
  bool credit_header_mass = true;
};

template <typename Scalar>
struct RAttnResult {
  Scalar score{0};
  Scalar total_mass{0};
  /// True when table mass is below epsilon; the score is then 0 and the
  /// step should not be used as a calibration sample.
  bool excluded = false;
};

/// Fraction of table attention mass that lands on designated cells.
/// Throws ShapeMismatch when attention and mask disagree.
template <typename Scalar>
RAttnResult<Scalar> r_attn_detailed(const BasicCellAttention<Scalar>& attn, const CellMask& mask,
                                    const RAttnOptions& options = {}) {
  if (!attn.same_shape(mask) || attn.header_scores.size() != attn.cols()) {
    throw ShapeMismatch("attention shape does not match mask");
  }
  const auto bits = mask.bits().template cast<Scalar>().array();
  Scalar on = (attn.scores.array() * bits).sum();
  Scalar off = (attn.scores.array() * (Scalar(1) - bits)).sum();
  for (Eigen::Index c = 0; c < attn.cols(); ++c) {
    if (options.credit_header_mass && mask.column_designated(c)) {
      on += attn.header_scores(c);
    } else {
      off += attn.header_scores(c);
    }
  }
  RAttnResult<Scalar> result;
  result.total_mass = on + off;
  if (result.total_mass < Scalar(options.epsilon)) {
    result.excluded = true;
    return result;
  }
  result.score = on / result.total_mass;
  return result;
}

template <typename Scalar>
Scalar r_attn(const BasicCellAttention<Scalar>& attn, const CellMask& mask, const RAttnOptions& options = {}) {
  return r_attn_detailed(attn, mask, options).score;
}

/// Row r of the result is row perm[r] of the input.
template <typename Scalar>
BasicCellAttention<Scalar> permute_rows(const BasicCellAttention<Scalar>& attn, std::span<const std::size_t> perm) {
  if (static_cast<Eigen::Index>(perm.size()) != attn.rows()) {
    throw InvalidPermutation("permutation size does not match attention rows");
  }
  invert_permutation(perm);
  BasicCellAttention<Scalar> out{typename BasicCellAttention<Scalar>::Matrix(attn.rows(), attn.cols()),
                                 attn.header_scores};
  for (std::size_t r = 0; r < perm.size(); ++r) {
    out.scores.row(static_cast<Eigen::Index>(r)) = attn.scores.row(static_cast<Eigen::Index>(perm[r]));
  }
  return out;
}

/// Attention payload from a backend, either
///   {"per_cell": [[float]], "per_header": [float]}   (per_header optional)
///   {"spans": [{"start": int, "end": int, "score": float}]}
/// The span form is resolved against `index`.
CellAttention attention_from_json(const nlohmann::json& j, const SpanIndex& index);
nlohmann::json attention_to_json(const CellAttention& attn);

}  // namespace tabground
