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

#include "tabground/masks.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "tabground/error.hpp"

namespace tabground {

namespace {

constexpr std::pair<NullKind, std::string_view> kKinds[] = {
    {NullKind::shuffle_cell, "shuffle_cell"},
    {NullKind::shuffle_within_row, "shuffle_within_row"},
    {NullKind::shuffle_within_col, "shuffle_within_col"},
    {NullKind::permute_columns, "permute_columns"},
};

template <typename Block, typename Rng>
void shuffle_block(Block&& block, Rng& rng) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(block.size()));
  for (Eigen::Index i = 0; i < block.size(); ++i) v[static_cast<std::size_t>(i)] = block(i);
  std::shuffle(v.begin(), v.end(), rng);
  for (Eigen::Index i = 0; i < block.size(); ++i) block(i) = v[static_cast<std::size_t>(i)];
}

}  // namespace

std::string_view to_string(NullKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<NullKind> null_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<CellMask> null_masks(const CellMask& mask, const NullMaskSpec& spec) {
  if (spec.draws < 1) throw InvalidArgument("null mask draws must be >= 1");
  if (mask.count() == 0) throw EmptyMask("null masks need at least one designated cell");

  std::mt19937_64 rng(spec.seed);
  std::vector<CellMask> out;
  out.reserve(static_cast<std::size_t>(spec.draws));
  for (int d = 0; d < spec.draws; ++d) {
    MaskBits bits = mask.bits();
    switch (spec.kind) {
      case NullKind::shuffle_cell:
        std::shuffle(bits.data(), bits.data() + bits.size(), rng);
        break;
      case NullKind::shuffle_within_row:
        for (Eigen::Index r = 0; r < bits.rows(); ++r) shuffle_block(bits.row(r), rng);
        break;
      case NullKind::shuffle_within_col:
        for (Eigen::Index c = 0; c < bits.cols(); ++c) shuffle_block(bits.col(c), rng);
        break;
      case NullKind::permute_columns: {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(bits.cols()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index c = 0; c < bits.cols(); ++c) {
          bits.col(c) = mask.bits().col(order[static_cast<std::size_t>(c)]);
        }
        break;
      }
    }
    out.emplace_back(std::move(bits), MaskProvenance::null_shuffled);
  }
  return out;
}

CellMask noise_mask(const CellMask& mask, double p_flip, std::uint64_t seed) {
  if (!(p_flip >= 0.0 && p_flip <= 1.0)) throw InvalidArgument("p_flip must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(p_flip);
  MaskBits bits = mask.bits();
  for (Eigen::Index r = 0; r < bits.rows(); ++r) {
    for (Eigen::Index c = 0; c < bits.cols(); ++c) {
      if (flip(rng)) bits(r, c) = bits(r, c) ? 0 : 1;
    }
  }
  return CellMask(std::move(bits), MaskProvenance::noised);
}

FalsificationResult falsification_ratio(const CellAttention& attn, const CellMask& gt_mask, const NullMaskSpec& spec,
                                        const RAttnOptions& options) {
  const auto nulls = null_masks(gt_mask, spec);
  FalsificationResult result;
  result.gt_score = r_attn(attn, gt_mask, options);
  result.null_scores.reserve(nulls.size());
  for (const auto& m : nulls) result.null_scores.push_back(r_attn(attn, m, options));
  result.mean_null_score = std::accumulate(result.null_scores.begin(), result.null_scores.end(), 0.0) /
                           static_cast<double>(result.null_scores.size());
  result.ratio = result.gt_score / std::max(result.mean_null_score, options.epsilon);
  return result;
}

}  // namespace tabground
