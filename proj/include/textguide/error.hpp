// Copyright 2026 The textguide Authors.
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
#include <string_view>

namespace textguide {

enum class ErrorCode {
  kMalformedRow,
  kDuplicateId,
  kEmptyText,
  kIo,
  kEmptyVocabulary,
  kDegenerateTraining,
  kInvalidArgument,
  kVersionMismatch,
  kMalformedLine,
  kInvalidSplit,
  kEmptySitfl,
  kMissingSitfl,
  kUnknownLabel,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this type. what() is prefixed
// with the code name, e.g. "DegenerateTraining: only one class present".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  // Re-raise with extra context prepended to the message, same code.
  [[noreturn]] static void rethrow_with_context(const Error& e, const std::string& context);

  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace textguide
