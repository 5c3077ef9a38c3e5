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
#include <random>
#include <string>
#include <vector>

#include "tabground/backends.hpp"
#include "tabground/standards.hpp"

namespace tabground {

/// Attention equal to the reference mask (headers zero). Row-permutation
/// equivariant by construction.
class OracleAttention final : public AttentionBackend {
 public:
  CellAttention attend(const AttentionRequest& request) const override;
};

/// Unit mass on every cell and header.
class UniformAttention final : public AttentionBackend {
 public:
  CellAttention attend(const AttentionRequest& request) const override;
};

/// Uniform(0, 1) noise keyed by (seed, record id, row position, column).
/// Ignores both cell content and the mask, so it stays fixed to table
/// positions when rows are reordered.
class PositionalNoiseAttention final : public AttentionBackend {
 public:
  explicit PositionalNoiseAttention(std::uint64_t seed = 0) : seed_(seed) {}
  CellAttention attend(const AttentionRequest& request) const override;

 private:
  std::uint64_t seed_;
};

/// Log-normal background exp(sigma z) plus `snr` on designated cells; the
/// noise is keyed by (seed, record id, row content, column) so permuting rows
/// permutes the attention with them. Headers carry background noise only.
class PeakedAttention final : public AttentionBackend {
 public:
  explicit PeakedAttention(double snr = 3.0, double sigma = 0.5, std::uint64_t seed = 0)
      : snr_(snr), sigma_(sigma), seed_(seed) {}
  CellAttention attend(const AttentionRequest& request) const override;

 private:
  double snr_;
  double sigma_;
  std::uint64_t seed_;
};

/// Deterministic uniform double in [0, 1) from a 64-bit key.
double hashed_uniform(std::uint64_t key);
/// Deterministic standard normal from a 64-bit key.
double hashed_normal(std::uint64_t key);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

struct SyntheticTableOptions {
  std::size_t min_rows = 1;
  std::size_t max_rows = 10;
  std::size_t min_cols = 1;
  std::size_t max_cols = 10;
};

/// Random table whose cells mix integers, decimals, words and the odd
/// delimiter or empty string.
Table random_table(std::mt19937_64& rng, const SyntheticTableOptions& options = {});

/// Random mask with between 1 and n_cells - 1 bits set when the table has at
/// least two cells (a single-cell table gets its one bit).
CellMask random_mask(std::mt19937_64& rng, const Table& table);

/// `count` standards with 2..8 rows and 2..5 columns, mixed datasets.
std::vector<AttentionStandard> synthetic_standards(std::size_t count, std::uint64_t seed);

}  // namespace tabground
