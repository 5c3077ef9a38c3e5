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

#include "tabground/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tabground/text.hpp"

namespace tabground {

namespace {

const CellMask& require_reference(const AttentionRequest& request) {
  if (request.reference_mask == nullptr || !request.reference_mask->same_shape(request.table)) {
    throw BackendError("synthetic attention needs a reference mask shaped like the table");
  }
  return *request.reference_mask;
}

std::uint64_t row_key(const Row& row) {
  std::uint64_t h = fnv1a64("row");
  for (const auto& cell : row) {
    h = fnv1a64(cell, h);
    h = fnv1a64("\x1f", h);
  }
  return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double hashed_uniform(std::uint64_t key) {
  return static_cast<double>(mix64(key, 0) >> 11) * 0x1.0p-53;
}

double hashed_normal(std::uint64_t key) {
  const double u1 = hashed_uniform(mix64(key, 1));
  const double u2 = hashed_uniform(mix64(key, 2));
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CellAttention OracleAttention::attend(const AttentionRequest& request) const {
  const CellMask& mask = require_reference(request);
  CellAttention attn = CellAttention::zeros(mask.rows(), mask.cols());
  attn.scores = mask.bits().cast<double>();
  return attn;
}

CellAttention UniformAttention::attend(const AttentionRequest& request) const {
  const auto rows = static_cast<Eigen::Index>(request.table.n_rows());
  const auto cols = static_cast<Eigen::Index>(request.table.n_cols());
  return {CellAttention::Matrix::Ones(rows, cols), CellAttention::Vector::Ones(cols)};
}

CellAttention PositionalNoiseAttention::attend(const AttentionRequest& request) const {
  const auto rows = static_cast<Eigen::Index>(request.table.n_rows());
  const auto cols = static_cast<Eigen::Index>(request.table.n_cols());
  const std::uint64_t base = mix64(seed_, fnv1a64(request.record_id));
  CellAttention attn = CellAttention::zeros(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      attn.scores(r, c) = hashed_uniform(mix64(mix64(base, static_cast<std::uint64_t>(r)), static_cast<std::uint64_t>(c)));
    }
  }
  return attn;
}

CellAttention PeakedAttention::attend(const AttentionRequest& request) const {
  const CellMask& mask = require_reference(request);
  const auto rows = static_cast<Eigen::Index>(request.table.n_rows());
  const auto cols = static_cast<Eigen::Index>(request.table.n_cols());
  const std::uint64_t base = mix64(seed_, fnv1a64(request.record_id));
  CellAttention attn = CellAttention::zeros(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::uint64_t rk = mix64(base, row_key(request.table.rows()[static_cast<std::size_t>(r)]));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double noise = std::exp(sigma_ * hashed_normal(mix64(rk, static_cast<std::uint64_t>(c))));
      attn.scores(r, c) = noise + (mask.test(r, c) ? snr_ : 0.0);
    }
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    attn.header_scores(c) = std::exp(sigma_ * hashed_normal(mix64(mix64(base, 0x4845414445ULL), static_cast<std::uint64_t>(c))));
  }
  return attn;
}

Table random_table(std::mt19937_64& rng, const SyntheticTableOptions& options) {
  std::uniform_int_distribution<std::size_t> n_rows_dist(options.min_rows, options.max_rows);
  std::uniform_int_distribution<std::size_t> n_cols_dist(std::max<std::size_t>(1, options.min_cols), options.max_cols);
  static const std::vector<std::string> words = {"alpha", "Beta", "gamma", "Algeria", "x|y", "back\\slash",
                                                 "two words", "", "  padded ", "1,234", "12.5%", "n/a"};
  const std::size_t n_rows = n_rows_dist(rng);
  const std::size_t n_cols = n_cols_dist(rng);

  std::vector<std::string> columns;
  for (std::size_t c = 0; c < n_cols; ++c) columns.push_back("col" + std::to_string(c) + (c % 3 == 2 ? " name" : ""));

  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> small(-50, 500);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::vector<Row> rows(n_rows, Row(n_cols));
  for (auto& row : rows) {
    for (auto& cell : row) {
      switch (kind(rng)) {
        case 0: cell = std::to_string(small(rng)); break;
        case 1: cell = std::to_string(small(rng)) + "." + std::to_string(small(rng) & 7); break;
        default: cell = words[pick(rng)]; break;
      }
    }
  }
  return Table(std::move(columns), std::move(rows));
}

CellMask random_mask(std::mt19937_64& rng, const Table& table) {
  const auto rows = static_cast<Eigen::Index>(table.n_rows());
  const auto cols = static_cast<Eigen::Index>(table.n_cols());
  CellMask mask(rows, cols, MaskProvenance::oracle);
  const Eigen::Index n = rows * cols;
  if (n == 0) return mask;
  const Eigen::Index k = n == 1 ? 1 : std::uniform_int_distribution<Eigen::Index>(1, n - 1)(rng);
  std::vector<Eigen::Index> cells(static_cast<std::size_t>(n));
  std::iota(cells.begin(), cells.end(), Eigen::Index{0});
  std::shuffle(cells.begin(), cells.end(), rng);
  for (Eigen::Index i = 0; i < k; ++i) mask.set(cells[static_cast<std::size_t>(i)] / cols, cells[static_cast<std::size_t>(i)] % cols);
  return mask;
}

std::vector<AttentionStandard> synthetic_standards(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const char* datasets[] = {"wtq", "tabfact", "hitab"};
  std::vector<AttentionStandard> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Table table = random_table(rng, {2, 8, 2, 5});
    CellMask mask = random_mask(rng, table);
    char id[32];
    std::snprintf(id, sizeof(id), "rec-%04zu", i);
    out.push_back({id, datasets[i % 3], "synthetic question " + std::to_string(i), std::move(table), std::move(mask)});
  }
  return out;
}

}  // namespace tabground
