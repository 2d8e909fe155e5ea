// Copyright 2026 The vpest Authors.
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

namespace vpest {

enum class ErrorCode {
  InvalidArgument,
  DegenerateSegment,
  SingularInput,
  EmptyInput,
  InsufficientLines,
  DegenerateBundle,
  RankDeficient,
  NonPositiveFocalSquared,
  ConfigMismatch,
  AllZeroWeights,
  NoModelFound,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Library error. Operations with a documented failure mode throw this with
// the matching code; minimal solvers report failures through SolveStatus.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure with a 1-based source location (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(ErrorCode::ParseError, message), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace vpest
