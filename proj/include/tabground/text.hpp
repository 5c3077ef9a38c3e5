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
#include <string>
#include <string_view>
#include <vector>

namespace tabground {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Lower-cases and collapses whitespace runs to one space, trimmed.
std::string normalize_text(std::string_view s);

/// Whitespace tokenization after case folding.
std::vector<std::string> tokenize_words(std::string_view s);

/// Lenient numeric reading of a cell or answer: surrounding whitespace,
/// thousands separators and one trailing '%' are stripped before parsing.
/// "1,234" -> 1234, "12.5%" -> 12.5, "abc" -> nullopt.
std::optional<double> parse_number(std::string_view s);

/// Shortest round-trip rendering; integral values print without a fraction.
std::string format_number(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace tabground
