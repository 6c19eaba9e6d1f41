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

// Task-centric representation: a typed dataframe DSL that keeps the
// algorithm of generated code while dropping library artifacts such as the
// `.str` accessor. Subscripts are disambiguated by the type of their base.
//
// Typing rules (S = Series, C = Scalar, F = Frame):
//
//   ColProject(F, name)            -> S(type of column)
//   RowFilter(F | S, S(Bool))      -> same as subject
//   Compare(S|C(T), S|C(T))        -> S(Bool) if any operand is S, else C(Bool)
//   And/Or/Not over Bool           -> S(Bool) if any operand is S, else C(Bool)
//   Add(Number|Text), Sub/Mul/Div(Number)
//                                  -> S if any operand is S, else C
//   Split(S(Text))                 -> S(ListOf(Text))
//   Replace/Lower/Strip(S(Text))   -> S(Text)
//   CountOccurrences / Len         -> S(Number);  Contains -> S(Bool)
//   ElemIndex char / word          -> S(Text) / S(element type)
//   ElemIndex element              -> C(element type)
//   ElemIndex tuple field          -> C(field type)
//   Sum/Mean(S(Number|Bool))       -> C(Number);  Min/Max(S(T)) -> C(T)
//   Count(S) -> C(Number);  RowCount(F) -> C(Number);  Agg over F -> F
//   Shape(F)                       -> LabeledTuple(rows, columns)
//   GroupBy(F) -> Grouped;  GroupSize(Grouped) -> F;  Transpose(F) -> F
//   DateYear(S(Date)) -> S(Number);  DateCeil(S(Date)) -> S(Date)

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nl2grid/object_code.hpp"
#include "nl2grid/table.hpp"

namespace nl2grid::tcr {

struct Schema {
  std::string frame_name = "df";
  std::vector<std::pair<std::string, ElemType>> columns;

  static Schema from_table(const Table& table, std::string frame_name = "df");

  std::optional<ElemType> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }
  /// Adds a column or updates the type of an existing one.
  void set(const std::string& name, ElemType type);
  std::vector<std::string> names() const;
};

struct Type {
  enum class Kind { Unknown, Frame, Series, Scalar, LabeledTuple, Grouped };

  Kind kind = Kind::Unknown;
  ElemType elem;                    // Series / Scalar
  std::vector<std::string> labels;  // LabeledTuple
  std::vector<ElemType> fields;     // LabeledTuple
  bool derived = false;             // Frame not shaped like the schema

  static Type frame(bool derived = false);
  static Type series(ElemType e);
  static Type scalar(ElemType e);
  static Type labeled_tuple(std::vector<std::string> labels, std::vector<ElemType> fields);
  static Type grouped();

  bool is_frame() const { return kind == Kind::Frame; }
  bool is_series() const { return kind == Kind::Series; }
  bool is_scalar() const { return kind == Kind::Scalar; }

  bool operator==(const Type&) const = default;
};

std::string to_string(const Type& t);

enum class Kind {
  FrameRef,
  VarRef,
  ColProject,
  RowFilter,
  Eq,
  NotEq,
  Gt,
  Ge,
  Lt,
  Le,
  And,
  Or,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Literal,
  LiteralList,
  Split,
  Replace,
  Lower,
  Strip,
  CountOccurrences,
  Contains,
  Len,
  ElemIndex,
  SliceRows,
  Sum,
  Min,
  Max,
  Mean,
  Count,
  RowCount,
  IdxMax,
  Shape,
  GroupBy,
  GroupSize,
  Transpose,
  DateYear,
  DateCeil,
};

std::string_view to_string(Kind k);
bool is_comparison(Kind k);
bool is_arithmetic(Kind k);
bool is_aggregate(Kind k);

enum class IndexKind { CharOfText, WordOfList, ElementOfSeries, TupleField };

std::string_view to_string(IndexKind k);

/// One TCR node. `args` holds expression children with the subject first
/// (for binary nodes: lhs, rhs; for RowFilter: subject, mask; for And/Or:
/// all operands). Scalar payloads live in the named fields.
struct Expr {
  Kind kind = Kind::FrameRef;
  std::vector<Expr> args;

  std::string name;         // column, variable, tuple label, or date unit
  std::string pattern;      // Split delimiter, Replace/Count/Contains pattern
  std::string replacement;  // Replace
  bool has_pattern = true;  // false for whitespace Split
  Value literal;            // Literal
  std::vector<Value> values;       // LiteralList
  std::vector<std::string> keys;   // GroupBy
  std::int64_t index = 0;          // ElemIndex
  IndexKind index_kind = IndexKind::ElementOfSeries;
  std::optional<std::int64_t> lo;  // SliceRows
  std::optional<std::int64_t> hi;

  Type type;

  const Expr& subject() const { return args.front(); }

  bool operator==(const Expr&) const = default;
};

// Node constructors (untyped; run typecheck or annotate to fill types).
Expr frame_ref();
Expr var_ref(std::string name);
Expr col(Expr frame, std::string name);
Expr col(std::string name);  // over FrameRef
Expr row_filter(Expr subject, Expr mask);
Expr binary(Kind k, Expr lhs, Expr rhs);
Expr nary(Kind k, std::vector<Expr> operands);
Expr negate(Expr operand);
Expr literal(Value v);
Expr literal_list(std::vector<Value> values);
Expr split(Expr subject, std::optional<std::string> delimiter);
Expr replace(Expr subject, std::string pattern, std::string replacement);
Expr unary_op(Kind k, Expr subject);  // Lower, Strip, Len, Agg kinds, Shape, GroupSize, Transpose, DateYear
Expr pattern_op(Kind k, Expr subject, std::string pattern);  // CountOccurrences, Contains
Expr elem_index(Expr subject, std::int64_t index, IndexKind kind, std::string label = {});
Expr slice_rows(Expr subject, std::optional<std::int64_t> lo, std::optional<std::int64_t> hi);
Expr group_by(Expr frame, std::vector<std::string> keys);
Expr date_ceil(Expr subject, std::string unit);

struct Statement {
  enum class Kind { CreateColumn, BindVar, Yield };
  Kind kind = Kind::Yield;
  std::string name;
  Expr expr;

  bool operator==(const Statement&) const = default;
};

struct Program {
  std::vector<Statement> statements;

  // Translation flags; not part of program identity.
  int dropped_statements = 0;          // no-op prints and unused expressions
  std::vector<std::string> overwrites; // CreateColumn targets that are original columns

  bool operator==(const Program& o) const { return statements == o.statements; }
};

using Env = std::map<std::string, Type, std::less<>>;

/// Computes the type of `expr` (recursively) against `schema` and local
/// bindings. Throws UnknownColumn or TypeMismatch.
Type infer_type(const Expr& expr, const Schema& schema, const Env& env = {});

/// Fills `type` on every node of `expr`.
void annotate(Expr& expr, const Schema& schema, const Env& env = {});

/// Annotates a whole program, threading created columns and bindings through
/// the schema. Validates statement forms (Yield only last, no Grouped value).
Program typecheck(Program program, const Schema& schema);

/// Schema after running the program's CreateColumn statements.
Schema extended_schema(const Program& program, const Schema& schema);

/// Type-directed translation from parsed object code.
/// Throws UnsupportedApi, UnknownColumn, TypeMismatch, AmbiguousSubscript or
/// UndisplayableOutput.
Program translate(const object::Ast& ast, const Schema& schema);

/// Parses and translates in one step.
Program translate_source(std::string_view source, const Schema& schema);

/// Object-language form with accessors reinstated.
object::Ast to_object(const Program& program, const Schema& schema);
object::Expr to_object(const Expr& expr, const Schema& schema);

/// Canonical code text; translate(parse(render_code(p))) == p.
std::string render_code(const Program& program, const Schema& schema);

/// Replaces VarRefs with their bound expressions and drops BindVar
/// statements. Types are preserved.
Program inline_bindings(const Program& program);

/// Stable JSON tree (node kind, type, payload, children).
std::string to_json(const Program& program, int indent = 2);

/// Accepts ISO YYYY-MM-DD plus the CSV date forms.
std::optional<Date> parse_date_literal(std::string_view text);

}  // namespace nl2grid::tcr
