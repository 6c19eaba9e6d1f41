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

// Syntax tree for the dataframe-code subset we explain: assignments and
// expression statements over names, literals, subscripts, attributes, calls
// and operators. Function definitions, loops, conditionals, comprehensions,
// lambdas and imports are rejected with UnsupportedConstruct.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nl2grid/error.hpp"

namespace nl2grid::object {

struct Expr {
  enum class Kind {
    Name,
    StringLit,
    NumberLit,
    ListLit,
    TupleLit,
    Subscript,  // args: base, index
    Attribute,  // args: base; text: attribute name
    Call,       // args: callee, positional...; keywords: named arguments
    BinOp,      // text: + - * / // % ** & |
    Compare,    // text: == != > >= < <=
    BoolOp,     // text: and / or; args: operands (>= 2)
    Slice,      // args: lo, hi; has_lo / has_hi mark which are present
    Unary,      // text: - + ~ not
  };

  struct Keyword;

  Kind kind = Kind::Name;
  std::string text;
  double number = 0;
  std::vector<Expr> args;
  std::vector<Keyword> keywords;
  bool has_lo = false;
  bool has_hi = false;
  SourceLocation loc;

  /// Structural equality; locations are ignored.
  bool operator==(const Expr& other) const;
};

struct Expr::Keyword {
  std::string name;
  Expr value;
  bool operator==(const Keyword&) const = default;
};

struct Stmt {
  enum class Kind { Assign, ExprStmt };
  Kind kind = Kind::ExprStmt;
  std::optional<Expr> target;
  Expr value;
  SourceLocation loc;

  bool operator==(const Stmt& other) const {
    return kind == other.kind && target == other.target && value == other.value;
  }
};

struct Ast {
  std::vector<Stmt> statements;
  bool operator==(const Ast&) const = default;
};

// Convenience constructors used by the TCR renderer and tests.
Expr name(std::string id);
Expr string_lit(std::string value);
Expr number_lit(double value);
Expr list_lit(std::vector<Expr> items);
Expr tuple_lit(std::vector<Expr> items);
Expr subscript(Expr base, Expr index);
Expr attribute(Expr base, std::string attr);
Expr call(Expr callee, std::vector<Expr> args = {});
Expr method(Expr base, std::string method_name, std::vector<Expr> args = {});
Expr binop(std::string op, Expr lhs, Expr rhs);
Expr compare(std::string op, Expr lhs, Expr rhs);
Expr unary(std::string op, Expr operand);
Expr slice(std::optional<Expr> lo, std::optional<Expr> hi);

/// Parses source text. Comments and blank lines are dropped.
/// Throws Error(UnsupportedConstruct | SyntaxError) with a source location.
Ast parse(std::string_view source);

/// Deterministic formatting: single quotes, single spaces around binary
/// operators, minimal parentheses, one statement per line.
std::string emit(const Ast& ast);
std::string emit(const Expr& expr);

/// Quotes a string value as an object-language literal, preferring single
/// quotes and raw strings when the value contains backslashes.
std::string quote_string(std::string_view value);

/// True for `print(df)` where `df` is the given frame name.
bool is_noop_print(const Stmt& stmt, std::string_view frame_name = "df");

}  // namespace nl2grid::object
