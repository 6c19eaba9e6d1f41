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


// Prompt assembly and code-generation backends: an HTTP completion endpoint
// and a deterministic offline mock driven by the grounded grammar plus a
// bundled rules file.

#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nl2grid/table.hpp"
#include "nl2grid/tcr.hpp"

namespace nl2grid::codegen {

/// Tables with more rows than this are sent as a schema comment plus a sample.
inline constexpr std::size_t kFullLiteralRows = 30;
inline constexpr std::size_t kSampleRows = 5;

struct Prompt {
  std::string language_header;  // "# Python 3"
  std::string library_header;   // "import pandas as pd"
  std::string frame_literal;    // "df = pd.DataFrame({...})"
  std::string query_comment;    // "# <query>"

  std::string query;  // the folded query text
  tcr::Schema schema;

  std::string assembled() const;
};

/// Throws Error(InvalidArgument) for an empty or blank query.
Prompt build_prompt(const Table& table, std::string_view query);

/// Object-language literal for one cell.
std::string cell_literal(const Value& v);

struct GenParams {
  double temperature = 0.0;
  std::string stop = "\n#";
  int max_tokens = 256;
};

struct Completion {
  std::string text;
  std::string backend_id;
  std::chrono::milliseconds latency{0};
};

/// Cuts `text` at the first occurrence of `stop`.
std::string truncate_at_stop(std::string_view text, std::string_view stop);

/// One free-form mock rule. `pattern` is an ECMAScript regex matched
/// case-insensitively against the whole query. In `code`, {N} inserts capture
/// N verbatim, {str:N} inserts it as a quoted literal and {col:N} inserts the
/// quoted name of the schema column closest to it (the rule is skipped when
/// none is close).
struct MockRule {
  std::string pattern;
  std::string code;
};

/// Parses a JSON array of {"pattern", "code"} objects.
std::vector<MockRule> parse_rules(std::string_view json_text);
/// Rules shipped with the library.
const std::vector<MockRule>& bundled_rules();

struct BackendConfig {
  enum class Kind { Mock, Http };

  Kind kind = Kind::Mock;
  std::string endpoint;
  std::string model = "code-davinci-002";
  std::string token;
  std::vector<MockRule> rules = bundled_rules();
  int max_attempts = 3;
  std::chrono::milliseconds backoff{200};
  std::chrono::seconds timeout{60};

  static BackendConfig mock();
  /// Reads NL2GRID_API_URL and NL2GRID_API_KEY. Throws Error(InvalidArgument)
  /// when either is unset.
  static BackendConfig http_from_env();
  /// Throws Error(InvalidArgument) if an Http config lacks endpoint or token.
  void validate() const;
};

/// Resolves a free-form column mention against the schema: exact, then
/// case-insensitive, then the column sharing the most words. Empty if none.
std::string fuzzy_column(std::string_view mention, const tcr::Schema& schema);

/// Offline backend: grounded steps first, then rules, else an empty completion.
Completion mock_generate(std::string_view query, const tcr::Schema& schema,
                         const std::vector<MockRule>& rules = bundled_rules());

/// Throws Error(TransportError) after the retry budget or Error(AuthError).
/// An empty completion is returned, not thrown.
Completion generate(const BackendConfig& cfg, const Prompt& prompt,
                    const GenParams& params = {});

/// Extracts completion text from an endpoint response body: choices[0].text,
/// choices[0].message.content, "completion" or "text".
std::string completion_text_from_response(std::string_view body);

}  // namespace nl2grid::codegen
