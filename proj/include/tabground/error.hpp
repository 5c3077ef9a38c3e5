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

#include <stdexcept>
#include <string>

namespace tabground {

/// Base of every exception thrown by the library. `kind()` is a stable
/// machine-readable tag (e.g. "MalformedTable") used in CLI error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define TABGROUND_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

TABGROUND_DEFINE_ERROR(InvalidTable)
TABGROUND_DEFINE_ERROR(InvalidPermutation)
TABGROUND_DEFINE_ERROR(InvalidToolCall)
TABGROUND_DEFINE_ERROR(RangeOutOfBounds)
TABGROUND_DEFINE_ERROR(ShapeMismatch)
TABGROUND_DEFINE_ERROR(DegenerateLabels)
TABGROUND_DEFINE_ERROR(EmptyMask)
TABGROUND_DEFINE_ERROR(EmptyEncoding)
TABGROUND_DEFINE_ERROR(SingleClass)
TABGROUND_DEFINE_ERROR(LengthMismatch)
TABGROUND_DEFINE_ERROR(DegenerateMarginals)
TABGROUND_DEFINE_ERROR(AllZeroDiffs)
TABGROUND_DEFINE_ERROR(BackendError)
TABGROUND_DEFINE_ERROR(FormatError)
TABGROUND_DEFINE_ERROR(InvalidArgument)

#undef TABGROUND_DEFINE_ERROR

/// Thrown by parse_table; carries the 1-based line of the offending input.
class MalformedTable : public Error {
 public:
  MalformedTable(std::size_t line, const std::string& reason)
      : Error("MalformedTable", "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace tabground
