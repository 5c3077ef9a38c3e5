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

#include "tabground/standards.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "tabground/text.hpp"

namespace tabground {

using nlohmann::json;

json table_to_json(const Table& table) {
  return json{{"columns", table.columns()}, {"rows", table.rows()}};
}

Table table_from_json(const json& j) {
  try {
    auto columns = j.at("columns").get<std::vector<std::string>>();
    auto rows = j.at("rows").get<std::vector<Row>>();
    return Table(std::move(columns), std::move(rows));
  } catch (const json::exception& e) {
    throw FormatError(std::string("table: ") + e.what());
  }
}

json mask_to_json(const CellMask& mask) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < mask.cols(); ++c) row.push_back(mask.test(r, c) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

CellMask mask_from_json(const json& j, MaskProvenance provenance) {
  if (!j.is_array()) throw FormatError("mask must be an array of rows");
  const auto n_rows = static_cast<Eigen::Index>(j.size());
  const auto n_cols = n_rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.front().size());
  MaskBits bits(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw FormatError("mask row " + std::to_string(r) + " is ragged");
    }
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
        throw FormatError("mask entries must be 0 or 1");
      }
      bits(r, c) = static_cast<std::uint8_t>(v.get<int>());
    }
  }
  return CellMask(std::move(bits), provenance);
}

json standard_to_json(const AttentionStandard& s) {
  return json{{"id", s.id},
              {"dataset", s.dataset},
              {"question", s.question},
              {"table", table_to_json(s.table)},
              {"mask", mask_to_json(s.mask)}};
}

AttentionStandard standard_from_json(const json& j) {
  try {
    Table table = table_from_json(j.at("table"));
    CellMask mask = mask_from_json(j.at("mask"));
    // A zero-row table serializes its mask as [], which carries no width.
    if (table.n_rows() == 0 && mask.rows() == 0) {
      mask = CellMask(0, static_cast<Eigen::Index>(table.n_cols()), MaskProvenance::oracle);
    }
    if (!mask.same_shape(table)) {
      throw ShapeMismatch("record '" + j.value("id", std::string{}) + "': mask shape does not match table");
    }
    return AttentionStandard{j.at("id").get<std::string>(), j.value("dataset", std::string{}),
                             j.value("question", std::string{}), std::move(table), std::move(mask)};
  } catch (const json::exception& e) {
    throw FormatError(std::string("standard record: ") + e.what());
  }
}

std::vector<json> read_jsonl(std::istream& in) {
  std::vector<json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_jsonl(in);
}

namespace {
std::vector<AttentionStandard> to_standards(const std::vector<json>& lines) {
  std::vector<AttentionStandard> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(standard_from_json(lines[i]));
    } catch (const ShapeMismatch& e) {
      throw ShapeMismatch("record " + std::to_string(i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError("record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}
}  // namespace

std::vector<AttentionStandard> read_standards(std::istream& in) { return to_standards(read_jsonl(in)); }

std::vector<AttentionStandard> read_standards(const std::filesystem::path& path) {
  return to_standards(read_jsonl(path));
}

void write_standards(std::ostream& out, const std::vector<AttentionStandard>& records) {
  for (const auto& r : records) out << standard_to_json(r).dump() << '\n';
}

}  // namespace tabground
