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


// Grounded utterances: numbered, editable steps laid out from a TCR program,
// and the parser that reads such steps back into a program.
//
// Layout:
//   * a single statement whose expression is a linear chain of single-subject
//     operations ending at the table becomes one instruction per operation;
//   * any other expression becomes one descriptive step;
//   * a new column contributes a leading "create column {name}" step;
//   * programs with several statements (after inlining bindings) get one
//     "create column {name} from {expr}" step per statement;
//   * row-selection masks are always described inline.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nl2grid/tcr.hpp"

namespace nl2grid::utterance {

/// Phrase templates for one TCR node form. `chain` is the instruction used
/// when the node is a step of a linear chain (empty when the form is never
/// chained); `inline_form` describes the node inside a larger phrase.
///
/// Slots: {0} and {1} are child expressions, {m} a row mask, {c} a column,
/// {p} {d} {a} {b} {u} text values, {k} a 1-based position, {label} a tuple
/// field, {lo} {hi} row bounds, {keys} grouping columns, {v} a literal.
struct Template {
  std::string id;
  tcr::Kind kind;
  std::string chain;
  std::string inline_form;
  int level = 8;      // binding strength of the inline phrase
  int lhs_level = 7;  // minimum level for child {0}
  int rhs_level = 7;  // minimum level for child {1}
  bool parse_only = false;
};

/// The full template set, rendering forms first and parse-only aliases after.
const std::vector<Template>& template_table();
const Template& find_template(std::string_view id);

/// One node of the explanation-rendering tree.
struct ErNode {
  enum class Style { Instructional, Descriptive };

  std::string template_id;
  std::map<std::string, std::string> slots;  // rendered slot text
  std::vector<ErNode> children;              // {0}, {1}, mask, operands
  int subject_arity = 0;
  Style style = Style::Instructional;
  bool chainable = false;  // has a chain template and a single subject
};

/// Throws Error(ExplanationUnavailable) for node forms without templates.
ErNode build_er_tree(const tcr::Expr& expr);

/// Descriptive text of a tree at the given minimum binding level.
std::string render_inline(const ErNode& node, int min_level = 0);

struct Step {
  std::string text;
  std::size_t statement = 0;  // index into the inlined program
  std::size_t depth = 0;      // chain position below the statement root
};

struct GroundedUtterance {
  std::vector<Step> steps;

  std::vector<std::string> texts() const;
  /// "(1) s1, (2) s2"
  std::string text() const;
};

/// Throws Error(ExplanationUnavailable).
GroundedUtterance generate_utterance(const tcr::Program& program);

/// 0-based index to the 1-based position shown to users. Throws for i < 0.
std::int64_t adjust_index_outbound(std::int64_t i);
/// 1-based position back to a 0-based index. Throws for k < 1.
std::int64_t adjust_index_inbound(std::int64_t k);

/// Reads a position phrase ("element 2", "position 1", "third", "2") and
/// returns the 0-based index; negative results count from the end.
std::optional<std::int64_t> detect_index(std::string_view phrase);

/// Parses grounded steps into a typed program. Column names resolve against
/// the schema plus columns created by earlier steps.
/// Throws Error(GrammarMismatch) naming the failing step and nearest template.
tcr::Program parse_grounded(const std::vector<std::string>& steps, const tcr::Schema& schema);

/// Splits "(1) a, (2) b" into {"a", "b"}; text without numbering is one step.
std::vector<std::string> split_steps(std::string_view query);

/// Joins steps as "(1) s1, (2) s2", skipping empty ones.
/// Throws Error(InvalidArgument) when every step is empty.
std::string concat_steps(const std::vector<std::string>& steps);

/// Comparison form of one step: quote glyphs removed, one trailing period
/// dropped, whitespace collapsed.
std::string normalize_step(std::string_view step);

/// True when both utterances have the same steps after normalize_step.
bool utterances_match(std::string_view a, std::string_view b);

}  // namespace nl2grid::utterance
