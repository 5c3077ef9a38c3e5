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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabground/table.hpp"

namespace tabground {

/// One curated (question, table, cell-relevance mask) record.
struct AttentionStandard {
  std::string id;
  std::string dataset;
  std::string question;
  Table table;
  CellMask mask;
};

nlohmann::json table_to_json(const Table& table);
Table table_from_json(const nlohmann::json& j);

nlohmann::json mask_to_json(const CellMask& mask);
CellMask mask_from_json(const nlohmann::json& j, MaskProvenance provenance = MaskProvenance::oracle);

nlohmann::json standard_to_json(const AttentionStandard& s);
/// Throws FormatError on missing fields and ShapeMismatch when the mask
/// does not match the table.
AttentionStandard standard_from_json(const nlohmann::json& j);

/// Reads one record per non-blank line. Errors carry the line number.
std::vector<AttentionStandard> read_standards(std::istream& in);
std::vector<AttentionStandard> read_standards(const std::filesystem::path& path);
void write_standards(std::ostream& out, const std::vector<AttentionStandard>& records);

/// Reads a JSONL file into raw JSON values; throws FormatError with the
/// offending line on parse failure and when the file cannot be opened.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
std::vector<nlohmann::json> read_jsonl(std::istream& in);

}  // namespace tabground
