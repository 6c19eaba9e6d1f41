/*
 * Copyright 2026 The nl2grid Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nl2grid {

enum class ErrorCode {
  InvalidArgument,
  // table-core
  CsvEmptyBody,
  CsvRaggedRow,
  CsvDuplicateHeader,
  CsvMalformed,
  UntypeableColumn,
  // object-code
  SyntaxError,
  UnsupportedConstruct,
  // tcr
  UnsupportedApi,
  UnknownColumn,
  TypeMismatch,
  AmbiguousSubscript,
  // utterance
  ExplanationUnavailable,
  GrammarMismatch,
  // interp
  OverwriteRefused,
  RuntimeFault,
  UnsupportedAtRuntime,
  UndisplayableOutput,  // the result has no grid or side-pane form
  // codegen
  TransportError,
  AuthError,
  // service / io
  NotFound,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Line/column pair into a source text; both 1-based.
struct SourceLocation {
  int line = 1;
  int column = 1;
  bool operator==(const SourceLocation&) const = default;
};

/// The single exception type thrown across the library. `code` classifies the
/// failure; `location` is set for errors that point into object code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<SourceLocation> location = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<SourceLocation>& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  std::optional<SourceLocation> location_;
};

}  // namespace nl2grid
