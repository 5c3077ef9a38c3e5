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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tabground/attention.hpp"
#include "tabground/table.hpp"

namespace tabground {

enum class NullKind { shuffle_cell, shuffle_within_row, shuffle_within_col, permute_columns };

std::string_view to_string(NullKind kind);
std::optional<NullKind> null_kind_from_string(std::string_view name);

struct NullMaskSpec {
  NullKind kind = NullKind::shuffle_cell;
  int draws = 50;
  std::uint64_t seed = 0;
};

/// Density-preserving null masks: every draw has exactly the input's bit
/// count. Row and column shuffles additionally keep per-row (per-column)
/// counts. Seeded; equal specs give equal draws. Throws EmptyMask when the
/// mask has no set bit, InvalidArgument when draws < 1.
std::vector<CellMask> null_masks(const CellMask& mask, const NullMaskSpec& spec);

/// Flips every bit independently with probability p_flip.
CellMask noise_mask(const CellMask& mask, double p_flip, std::uint64_t seed);

struct FalsificationResult {
  double gt_score = 0.0;
  double mean_null_score = 0.0;
  double ratio = 0.0;  ///< gt_score / max(mean_null_score, epsilon)
  std::vector<double> null_scores;
};

FalsificationResult falsification_ratio(const CellAttention& attn, const CellMask& gt_mask, const NullMaskSpec& spec,
                                        const RAttnOptions& options = {});

}  // namespace tabground
