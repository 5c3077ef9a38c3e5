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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabground/backends.hpp"
#include "tabground/masks.hpp"
#include "tabground/standards.hpp"
#include "tabground/stats.hpp"

namespace tabground {

struct PipelineOptions {
  std::size_t workers = 0;  ///< 0 picks the hardware concurrency
};

/// Runs fn(i) for i in [0, n) on a bounded pool. The first exception thrown
/// by any task is rethrown after all workers have stopped.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Data cells of `attn` paired with the mask bits, row-major.
std::vector<ScoredLabel> flatten_cells(const CellAttention& attn, const CellMask& mask);

/// Attention for a standard (or a permuted view of one) at step 0, with the
/// mask passed as the reference.
CellAttention attend_standard(const AttentionBackend& backend, const AttentionStandard& standard);

struct AurocRecord {
  std::string id;
  std::string dataset;
  std::string status;  ///< "ok", "invalid" (single-class mask) or "error"
  std::string detail;
  std::optional<double> auroc;
};

struct DatasetMean {
  std::size_t n_valid = 0;
  std::size_t n_invalid = 0;
  std::optional<double> mean;
};

struct AurocReport {
  std::vector<AurocRecord> records;  ///< sorted by id
  std::map<std::string, DatasetMean> per_dataset;
  DatasetMean overall;
};

AurocReport eval_auroc(const std::vector<AttentionStandard>& standards, const AttentionBackend& backend,
                       const PipelineOptions& options = {});

/// View 0 is the identity; view k > 0 is a uniform shuffle seeded from
/// (seed, record id, k).
std::vector<std::size_t> view_permutation(std::string_view id, std::size_t n_rows, std::size_t view,
                                          std::uint64_t seed);

struct PermRecord {
  std::string id;
  std::string dataset;
  std::string status;  ///< "ok", "dropped" (too few valid views) or "error"
  std::string detail;
  std::vector<std::optional<double>> view_aurocs;
  std::optional<double> sigma;
};

struct PermReport {
  std::size_t views = 5;
  std::uint64_t seed = 0;
  std::vector<PermRecord> records;
  std::size_t n_valid = 0;
  std::size_t n_dropped = 0;
  std::optional<double> mean_sigma;
  std::optional<double> max_sigma;
};

PermReport eval_perm_stability(const std::vector<AttentionStandard>& standards, const AttentionBackend& backend,
                               std::size_t views = 5, std::uint64_t seed = 0, const PipelineOptions& options = {});

struct FalsificationOptions {
  int draws = 50;
  std::uint64_t seed = 0;
  std::vector<NullKind> kinds = {NullKind::shuffle_cell, NullKind::shuffle_within_row, NullKind::shuffle_within_col,
                                 NullKind::permute_columns};
  RAttnOptions r_attn;
};

struct FalsificationRecord {
  std::string id;
  std::string dataset;
  std::string status;  ///< "ok", "skipped" (empty mask) or "error"
  std::string detail;
  double gt_score = 0.0;
  std::map<std::string, double> mean_null;  ///< keyed by null kind
  std::map<std::string, double> ratio;
};

struct FalsificationReport {
  std::vector<FalsificationRecord> records;
  std::size_t n_used = 0;
  std::size_t n_skipped = 0;
  std::size_t n_errors = 0;
  double mean_gt = 0.0;
  std::map<std::string, double> mean_null;
  /// mean_gt / max(mean_null, epsilon) per kind.
  std::map<std::string, double> ratio;
  /// Mean of the per-record ratios per kind.
  std::map<std::string, double> mean_record_ratio;
  /// Paired signed-rank test on gt - mean cell-shuffle null; absent with
  /// fewer than two usable records or when every difference is zero.
  std::optional<TestResult> wilcoxon;
  std::string wilcoxon_note;
};

FalsificationReport eval_falsification(const std::vector<AttentionStandard>& standards,
                                       const AttentionBackend& backend, const FalsificationOptions& spec = {},
                                       const PipelineOptions& options = {});

struct LabelRecord {
  std::string id;
  std::string dataset;
  std::string unit;   ///< "cell" or "step"
  std::string label;
};

LabelRecord label_from_json(const nlohmann::json& j);
std::vector<LabelRecord> read_labels(const std::filesystem::path& path);

struct AgreementStats {
  std::size_t n = 0;
  std::optional<double> agreement;
  std::optional<double> kappa;
  std::string note;
};

struct LabelabilityReport {
  /// unit -> dataset -> stats; the "pooled" dataset key spans all datasets.
  std::map<std::string, std::map<std::string, AgreementStats>> by_unit;
  std::size_t n_joined = 0;
  std::size_t n_excluded_unsure = 0;
  std::vector<std::string> join_misses;  ///< "unit:id", sorted
};

/// Joins on (unit, id). Step records whose human label is "unsure" are
/// dropped before agreement. Labels compare case-insensitively.
LabelabilityReport eval_labelability(const std::vector<LabelRecord>& judge, const std::vector<LabelRecord>& human);

nlohmann::json to_json(const AurocReport& report);
nlohmann::json to_json(const PermReport& report);
nlohmann::json to_json(const FalsificationReport& report);
nlohmann::json to_json(const LabelabilityReport& report);
nlohmann::json to_json(const TestResult& result);

}  // namespace tabground
