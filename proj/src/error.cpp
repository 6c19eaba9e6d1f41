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

#include "nl2grid/error.hpp"

namespace nl2grid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CsvEmptyBody: return "CsvEmptyBody";
    case ErrorCode::CsvRaggedRow: return "CsvRaggedRow";
    case ErrorCode::CsvDuplicateHeader: return "CsvDuplicateHeader";
    case ErrorCode::CsvMalformed: return "CsvMalformed";
    case ErrorCode::UntypeableColumn: return "UntypeableColumn";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::UnsupportedApi: return "UnsupportedApi";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::AmbiguousSubscript: return "AmbiguousSubscript";
    case ErrorCode::ExplanationUnavailable: return "ExplanationUnavailable";
    case ErrorCode::GrammarMismatch: return "GrammarMismatch";
    case ErrorCode::OverwriteRefused: return "OverwriteRefused";
    case ErrorCode::RuntimeFault: return "RuntimeFault";
    case ErrorCode::UnsupportedAtRuntime: return "UnsupportedAtRuntime";
    case ErrorCode::UndisplayableOutput: return "UndisplayableOutput";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string with_location(const std::string& message, const std::optional<SourceLocation>& loc) {
  if (!loc) return message;
  return message + " (line " + std::to_string(loc->line) + ", column " +
         std::to_string(loc->column) + ")";
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<SourceLocation> location)
    : std::runtime_error(with_location(message, location)), code_(code), location_(location) {}

}  // namespace nl2grid
