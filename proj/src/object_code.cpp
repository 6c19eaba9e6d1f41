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

#include "nl2grid/object_code.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "nl2grid/table.hpp"

namespace nl2grid::object {

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind || text != o.text || has_lo != o.has_lo || has_hi != o.has_hi) return false;
  if (kind == Kind::NumberLit && number != o.number) return false;
  return args == o.args && keywords == o.keywords;
}

Expr name(std::string id) {
  Expr e;
  e.kind = Expr::Kind::Name;
  e.text = std::move(id);
  return e;
}

Expr string_lit(std::string value) {
  Expr e;
  e.kind = Expr::Kind::StringLit;
  e.text = std::move(value);
  return e;
}

Expr number_lit(double value) {
  Expr e;
  e.kind = Expr::Kind::NumberLit;
  e.number = value;
  return e;
}

Expr list_lit(std::vector<Expr> items) {
  Expr e;
  e.kind = Expr::Kind::ListLit;
  e.args = std::move(items);
  return e;
}

Expr tuple_lit(std::vector<Expr> items) {
  Expr e;
  e.kind = Expr::Kind::TupleLit;
  e.args = std::move(items);
  return e;
}

Expr subscript(Expr base, Expr index) {
  Expr e;
  e.kind = Expr::Kind::Subscript;
  e.args = {std::move(base), std::move(index)};
  return e;
}

Expr attribute(Expr base, std::string attr) {
  Expr e;
  e.kind = Expr::Kind::Attribute;
  e.text = std::move(attr);
  e.args = {std::move(base)};
  return e;
}

Expr call(Expr callee, std::vector<Expr> args) {
  Expr e;
  e.kind = Expr::Kind::Call;
  e.args.push_back(std::move(callee));
  for (auto& a : args) e.args.push_back(std::move(a));
  return e;
}

Expr method(Expr base, std::string method_name, std::vector<Expr> args) {
  return call(attribute(std::move(base), std::move(method_name)), std::move(args));
}

Expr binop(std::string op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Expr::Kind::BinOp;
  e.text = std::move(op);
  e.args = {std::move(lhs), std::move(rhs)};
  return e;
}

Expr compare(std::string op, Expr lhs, Expr rhs) {
  Expr e = binop(std::move(op), std::move(lhs), std::move(rhs));
  e.kind = Expr::Kind::Compare;
  return e;
}

Expr unary(std::string op, Expr operand) {
  Expr e;
  e.kind = Expr::Kind::Unary;
  e.text = std::move(op);
  e.args = {std::move(operand)};
  return e;
}

Expr slice(std::optional<Expr> lo, std::optional<Expr> hi) {
  Expr e;
  e.kind = Expr::Kind::Slice;
  e.has_lo = lo.has_value();
  e.has_hi = hi.has_value();
  e.args = {lo ? std::move(*lo) : number_lit(0), hi ? std::move(*hi) : number_lit(0)};
  return e;
}

namespace {

// ---------------------------------------------------------------------------
// Tokenizer

enum class Tok { Name, Number, String, Op, Newline, End };

struct Token {
  Tok kind;
  std::string text;  // decoded value for strings
  SourceLocation loc;
  bool indented = false;  // first token of a logical line preceded by whitespace
};

const std::unordered_map<std::string_view, std::string_view>& unsupported_keywords() {
  static const std::unordered_map<std::string_view, std::string_view> kw = {
      {"def", "function declaration"},   {"class", "class declaration"},
      {"for", "loop"},                   {"while", "loop"},
      {"if", "control flow"},            {"elif", "control flow"},
      {"else", "control flow"},          {"try", "exception handling"},
      {"except", "exception handling"},  {"finally", "exception handling"},
      {"with", "context manager"},       {"import", "import"},
      {"from", "import"},                {"lambda", "lambda"},
      {"return", "return statement"},    {"yield", "generator"},
      {"async", "coroutine"},            {"await", "coroutine"},
      {"global", "scope declaration"},   {"nonlocal", "scope declaration"},
      {"del", "deletion"},               {"raise", "exception handling"},
      {"assert", "assertion"},           {"pass", "control flow"},
      {"break", "control flow"},         {"continue", "control flow"},
  };
  return kw;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool line_start = true;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        if (depth_ == 0 && !out.empty() && out.back().kind != Tok::Newline)
          out.push_back({Tok::Newline, "", here()});
        advance();
        line_start = true;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' ||
                                      src_[pos_] == '\f'))
          advance();
        if (line_start && depth_ == 0 && pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '#')
          pending_indent_ = pos_ > start;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
        advance();
        if (src_[pos_] == '\r') advance();
        if (pos_ < src_.size() && src_[pos_] == '\n') advance();
        continue;
      }
      Token t = next_token();
      if (line_start && depth_ == 0) t.indented = pending_indent_;
      if (t.kind == Tok::Op && t.text == ";") {
        if (depth_ == 0 && !out.empty() && out.back().kind != Tok::Newline)
          out.push_back({Tok::Newline, "", t.loc});
        line_start = true;
        pending_indent_ = false;
        continue;
      }
      pending_indent_ = false;
      line_start = false;
      out.push_back(std::move(t));
    }
    if (!out.empty() && out.back().kind != Tok::Newline) out.push_back({Tok::Newline, "", here()});
    out.push_back({Tok::End, "", here()});
    return out;
  }

 private:
  SourceLocation here() const { return {line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, SourceLocation loc) const {
    throw Error(ErrorCode::SyntaxError, msg, loc);
  }

  Token next_token() {
    SourceLocation loc = here();
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                                    static_cast<unsigned char>(src_[pos_]) >= 0x80))
        advance();
      std::string word(src_.substr(start, pos_ - start));
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"')) {
        std::string prefix = word;
        for (auto& ch : prefix) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (prefix == "r" || prefix == "u" || prefix == "b" || prefix == "rb" || prefix == "br")
          return lex_string(loc, prefix.find('r') != std::string::npos);
        if (prefix.find('f') != std::string::npos)
          throw Error(ErrorCode::UnsupportedConstruct, "unsupported construct: f-string", loc);
      }
      return {Tok::Name, std::move(word), loc};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' || src_[pos_] == '_' ||
              ((src_[pos_] == '+' || src_[pos_] == '-') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
        advance();
      std::string num;
      for (char ch : src_.substr(start, pos_ - start))
        if (ch != '_') num += ch;
      if (!parse_number(num)) fail("invalid number literal '" + num + "'", loc);
      return {Tok::Number, num, loc};
    }
    if (c == '\'' || c == '"') return lex_string(loc, false);

    static const char* three[] = {"**=", "//=", ">>=", "<<="};
    static const char* two[] = {"==", "!=", ">=", "<=", "//", "**", "+=", "-=", "*=", "/=",
                                "&=", "|=", "->", ":=", "<<", ">>", "%=", "^="};
    for (const char* op : three)
      if (src_.substr(pos_, 3) == op) {
        advance(), advance(), advance();
        return {Tok::Op, op, loc};
      }
    for (const char* op : two)
      if (src_.substr(pos_, 2) == op) {
        advance(), advance();
        return {Tok::Op, op, loc};
      }
    if (std::string_view("()[]{}").find(c) != std::string_view::npos) {
      if (c == '(' || c == '[' || c == '{') ++depth_;
      else if (depth_ > 0) --depth_;
      advance();
      return {Tok::Op, std::string(1, c), loc};
    }
    if (std::string_view("+-*/%&|~^<>=.,:;@!").find(c) != std::string_view::npos) {
      advance();
      return {Tok::Op, std::string(1, c), loc};
    }
    fail(std::string("unexpected character '") + c + "'", loc);
  }

  Token lex_string(SourceLocation loc, bool raw) {
    char quote = src_[pos_];
    bool triple = src_.substr(pos_, 3) == std::string(3, quote);
    for (int i = 0; i < (triple ? 3 : 1); ++i) advance();
    std::string value;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated string literal", loc);
      char c = src_[pos_];
      if (!triple && c == '\n') fail("unterminated string literal", loc);
      if (c == quote) {
        if (!triple) {
          advance();
          break;
        }
        if (src_.substr(pos_, 3) == std::string(3, quote)) {
          advance(), advance(), advance();
          break;
        }
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char n = src_[pos_ + 1];
        advance(), advance();
        if (raw) {
          value += '\\';
          value += n;
          continue;
        }
        switch (n) {
          case '\\': value += '\\'; break;
          case '\'': value += '\''; break;
          case '"': value += '"'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '\n': break;
          default:
            // Regex escapes such as \b \w stay verbatim.
            value += '\\';
            value += n;
        }
        continue;
      }
      value += c;
      advance();
    }
    return {Tok::String, std::move(value), loc};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
  bool pending_indent_ = false;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Ast run() {
    Ast ast;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Newline) {
        ++i_;
        continue;
      }
      ast.statements.push_back(statement());
    }
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  const Token& take() { return toks_[std::min(i_++, toks_.size() - 1)]; }

  bool at_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }
  bool at_name(std::string_view n) const { return peek().kind == Tok::Name && peek().text == n; }

  [[noreturn]] void syntax(const std::string& msg, const Token& at) const {
    throw Error(ErrorCode::SyntaxError, msg, at.loc);
  }

  [[noreturn]] void unsupported(std::string_view what, const Token& at) const {
    throw Error(ErrorCode::UnsupportedConstruct, "unsupported construct: " + std::string(what), at.loc);
  }

  void check_keyword(const Token& t) const {
    if (t.kind != Tok::Name) return;
    const auto& kw = unsupported_keywords();
    if (auto it = kw.find(t.text); it != kw.end()) unsupported(it->second, t);
  }

  void expect_op(std::string_view op) {
    if (!at_op(op)) {
      const auto& t = peek();
      syntax("expected '" + std::string(op) + "' but found " +
                 (t.kind == Tok::Newline ? std::string("end of line")
                  : t.kind == Tok::End   ? std::string("end of input")
                                         : "'" + t.text + "'"),
             t);
    }
    ++i_;
  }

  Stmt statement() {
    const Token& first = peek();
    check_keyword(first);
    if (first.indented) syntax("unexpected indent", first);
    Stmt s;
    s.loc = first.loc;
    Expr lhs = expression();
    if (at_op("=")) {
      ++i_;
      if (lhs.kind == Expr::Kind::TupleLit) unsupported("tuple unpacking", first);
      s.kind = Stmt::Kind::Assign;
      s.target = std::move(lhs);
      s.value = expression();
      if (at_op("=")) unsupported("multi-target assignment", peek());
    } else {
      static const std::string_view augmented[] = {"+=", "-=", "*=", "/=", "//=", "%=",
                                                   "**=", "&=", "|=", "^=", ">>=", "<<="};
      for (auto op : augmented)
        if (at_op(op)) unsupported("augmented assignment", peek());
      if (at_op(":=")) unsupported("assignment expression", peek());
      s.kind = Stmt::Kind::ExprStmt;
      s.value = std::move(lhs);
    }
    if (peek().kind != Tok::Newline && peek().kind != Tok::End) {
      check_keyword(peek());
      syntax("unexpected '" + peek().text + "'", peek());
    }
    return s;
  }

  // expression ::= or_test [',' ...]  (bare tuples)
  Expr expression() {
    SourceLocation loc = peek().loc;
    Expr e = test();
    if (!at_op(",")) return e;
    std::vector<Expr> items{std::move(e)};
    while (at_op(",")) {
      ++i_;
      if (ends_expression()) break;
      items.push_back(test());
    }
    Expr t = tuple_lit(std::move(items));
    t.loc = loc;
    return t;
  }

  bool ends_expression() const {
    const auto& t = peek();
    return t.kind == Tok::Newline || t.kind == Tok::End ||
           (t.kind == Tok::Op && (t.text == ")" || t.text == "]" || t.text == "=" || t.text == "}"));
  }

  Expr test() {
    if (at_name("lambda")) unsupported("lambda", peek());
    if (at_name("yield") || at_name("await")) check_keyword(peek());
    Expr e = or_test();
    if (at_name("if")) unsupported("conditional expression", peek());
    if (at_name("for")) unsupported("comprehension", peek());
    return e;
  }

  Expr bool_chain(std::string_view word, Expr (Parser::*next)()) {
    SourceLocation loc = peek().loc;
    Expr first = (this->*next)();
    if (!at_name(word)) return first;
    Expr e;
    e.kind = Expr::Kind::BoolOp;
    e.text = std::string(word);
    e.loc = loc;
    e.args.push_back(std::move(first));
    while (at_name(word)) {
      ++i_;
      e.args.push_back((this->*next)());
    }
    return e;
  }

  Expr or_test() { return bool_chain("or", &Parser::and_test); }
  Expr and_test() { return bool_chain("and", &Parser::not_test); }

  Expr not_test() {
    if (at_name("not")) {
      SourceLocation loc = take().loc;
      Expr e = unary("not", not_test());
      e.loc = loc;
      return e;
    }
    return comparison();
  }

  std::optional<std::string> compare_op() const {
    static const std::string_view ops[] = {"==", "!=", ">=", "<=", ">", "<"};
    for (auto op : ops)
      if (at_op(op)) return std::string(op);
    return std::nullopt;
  }

  Expr comparison() {
    SourceLocation loc = peek().loc;
    Expr lhs = bitor_expr();
    if (at_name("in") || (at_name("not") && peek(1).text == "in") || at_name("is"))
      unsupported("membership or identity test", peek());
    auto op = compare_op();
    if (!op) return lhs;
    ++i_;
    Expr rhs = bitor_expr();
    if (compare_op()) unsupported("chained comparison", peek());
    Expr e = compare(*op, std::move(lhs), std::move(rhs));
    e.loc = loc;
    return e;
  }

  Expr left_assoc(std::initializer_list<std::string_view> ops, Expr (Parser::*next)()) {
    SourceLocation loc = peek().loc;
    Expr lhs = (this->*next)();
    while (true) {
      std::optional<std::string> found;
      for (auto op : ops)
        if (at_op(op)) found = std::string(op);
      if (!found) return lhs;
      ++i_;
      Expr rhs = (this->*next)();
      lhs = binop(*found, std::move(lhs), std::move(rhs));
      lhs.loc = loc;
    }
  }

  Expr bitor_expr() { return left_assoc({"|"}, &Parser::bitxor_expr); }
  Expr bitxor_expr() {
    Expr e = bitand_expr();
    if (at_op("^")) unsupported("operator '^'", peek());
    return e;
  }
  Expr bitand_expr() { return left_assoc({"&"}, &Parser::shift_expr); }
  Expr shift_expr() {
    Expr e = arith_expr();
    if (at_op("<<") || at_op(">>")) unsupported("shift operator", peek());
    return e;
  }
  Expr arith_expr() { return left_assoc({"+", "-"}, &Parser::term); }
  Expr term() { return left_assoc({"*", "/", "//", "%"}, &Parser::factor); }

  Expr factor() {
    if (at_op("-") || at_op("+") || at_op("~")) {
      const Token& t = take();
      Expr operand = factor();
      if (t.text == "-" && operand.kind == Expr::Kind::NumberLit && operand.number > 0) {
        operand.number = -operand.number;
        operand.loc = t.loc;
        return operand;
      }
      Expr e = unary(t.text, std::move(operand));
      e.loc = t.loc;
      return e;
    }
    return power();
  }

  Expr power() {
    SourceLocation loc = peek().loc;
    Expr base = primary();
    if (at_op("**")) {
      ++i_;
      Expr e = binop("**", std::move(base), factor());
      e.loc = loc;
      return e;
    }
    return base;
  }

  Expr primary() {
    Expr e = atom();
    while (true) {
      if (at_op("(")) {
        SourceLocation loc = take().loc;
        Expr c = call(std::move(e));
        c.loc = loc;
        arguments(c);
        e = std::move(c);
      } else if (at_op("[")) {
        SourceLocation loc = take().loc;
        Expr index = subscript_index();
        expect_op("]");
        e = subscript(std::move(e), std::move(index));
        e.loc = loc;
      } else if (at_op(".")) {
        ++i_;
        const Token& t = take();
        if (t.kind != Tok::Name) syntax("expected attribute name", t);
        e = attribute(std::move(e), t.text);
        e.loc = t.loc;
      } else {
        return e;
      }
    }
  }

  void arguments(Expr& c) {
    bool seen_keyword = false;
    while (!at_op(")")) {
      if (at_op("*") || at_op("**")) unsupported("argument unpacking", peek());
      if (peek().kind == Tok::Name && peek(1).kind == Tok::Op && peek(1).text == "=") {
        std::string key = take().text;
        ++i_;
        c.keywords.push_back({std::move(key), test()});
        seen_keyword = true;
      } else {
        if (seen_keyword) syntax("positional argument follows keyword argument", peek());
        c.args.push_back(test());
      }
      if (at_name("for")) unsupported("generator expression", peek());
      if (!at_op(",")) break;
      ++i_;
    }
    expect_op(")");
  }

  Expr slice_or_test() {
    SourceLocation loc = peek().loc;
    std::optional<Expr> lo;
    if (!at_op(":")) {
      lo = test();
      if (!at_op(":")) return std::move(*lo);
    }
    ++i_;  // ':'
    std::optional<Expr> hi;
    if (!at_op("]") && !at_op(",") && !at_op(":")) hi = test();
    if (at_op(":")) unsupported("slice step", peek());
    Expr s = slice(std::move(lo), std::move(hi));
    s.loc = loc;
    return s;
  }

  Expr subscript_index() {
    SourceLocation loc = peek().loc;
    Expr first = slice_or_test();
    if (!at_op(",")) return first;
    std::vector<Expr> items{std::move(first)};
    while (at_op(",")) {
      ++i_;
      if (at_op("]")) break;
      items.push_back(slice_or_test());
    }
    Expr t = tuple_lit(std::move(items));
    t.loc = loc;
    return t;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Name: {
        check_keyword(t);
        if (t.text == "not" || t.text == "and" || t.text == "or" || t.text == "in" || t.text == "is")
          syntax("unexpected keyword '" + t.text + "'", t);
        ++i_;
        Expr e = name(t.text);
        e.loc = t.loc;
        return e;
      }
      case Tok::Number: {
        ++i_;
        Expr e = number_lit(*parse_number(t.text));
        e.loc = t.loc;
        return e;
      }
      case Tok::String: {
        ++i_;
        std::string value = t.text;
        // Adjacent literals concatenate.
        while (peek().kind == Tok::String) value += take().text;
        Expr e = string_lit(std::move(value));
        e.loc = t.loc;
        return e;
      }
      case Tok::Op:
        if (t.text == "(") {
          ++i_;
          if (at_op(")")) {
            ++i_;
            Expr e = tuple_lit({});
            e.loc = t.loc;
            return e;
          }
          Expr inner = test();
          if (at_name("for")) unsupported("generator expression", peek());
          if (at_op(",")) {
            std::vector<Expr> items{std::move(inner)};
            while (at_op(",")) {
              ++i_;
              if (at_op(")")) break;
              items.push_back(test());
            }
            inner = tuple_lit(std::move(items));
            inner.loc = t.loc;
          }
          expect_op(")");
          return inner;
        }
        if (t.text == "[") {
          ++i_;
          std::vector<Expr> items;
          while (!at_op("]")) {
            items.push_back(test());
            if (at_name("for")) unsupported("list comprehension", peek());
            if (!at_op(",")) break;
            ++i_;
          }
          expect_op("]");
          Expr e = list_lit(std::move(items));
          e.loc = t.loc;
          return e;
        }
        if (t.text == "{") unsupported("dict or set literal", t);
        break;
      case Tok::Newline:
      case Tok::End:
        syntax("unexpected end of statement", t);
    }
    syntax("unexpected '" + t.text + "'", t);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Emitter

enum Prec : int {
  kOr = 1,
  kAnd = 2,
  kNot = 3,
  kCompare = 4,
  kBitOr = 5,
  kBitAnd = 7,
  kArith = 9,
  kTerm = 10,
  kUnary = 11,
  kPower = 12,
  kPrimary = 13,
};

int binop_prec(std::string_view op) {
  if (op == "|") return kBitOr;
  if (op == "&") return kBitAnd;
  if (op == "+" || op == "-") return kArith;
  if (op == "**") return kPower;
  return kTerm;
}

int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::BoolOp: return e.text == "or" ? kOr : kAnd;
    case Expr::Kind::Unary: return e.text == "not" ? kNot : kUnary;
    case Expr::Kind::Compare: return kCompare;
    case Expr::Kind::BinOp: return binop_prec(e.text);
    case Expr::Kind::NumberLit: return e.number < 0 ? kUnary : kPrimary;
    case Expr::Kind::TupleLit: return 0;
    default: return kPrimary;
  }
}

std::string emit_expr(const Expr& e, int min_prec);

std::string wrap(const Expr& e, int min_prec) {
  std::string s = emit_expr(e, min_prec);
  return prec_of(e) < min_prec ? "(" + s + ")" : s;
}

std::string emit_slice_part(const Expr& e) {
  if (e.kind != Expr::Kind::Slice) return emit_expr(e, 0);
  std::string out;
  if (e.has_lo) out += wrap(e.args[0], kOr);
  out += ":";
  if (e.has_hi) out += wrap(e.args[1], kOr);
  return out;
}

std::string emit_expr(const Expr& e, int) {
  switch (e.kind) {
    case Expr::Kind::Name: return e.text;
    case Expr::Kind::StringLit: return quote_string(e.text);
    case Expr::Kind::NumberLit: return format_number(e.number);
    case Expr::Kind::ListLit:
    case Expr::Kind::TupleLit: {
      bool tuple = e.kind == Expr::Kind::TupleLit;
      std::string out = tuple ? "(" : "[";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += wrap(e.args[i], kOr);
      }
      if (tuple && e.args.size() == 1) out += ",";
      return out + (tuple ? ")" : "]");
    }
    case Expr::Kind::Subscript: {
      std::string out = wrap(e.args[0], kPrimary) + "[";
      const Expr& idx = e.args[1];
      if (idx.kind == Expr::Kind::TupleLit && !idx.args.empty()) {
        for (std::size_t i = 0; i < idx.args.size(); ++i) {
          if (i) out += ", ";
          out += emit_slice_part(idx.args[i]);
        }
      } else {
        out += emit_slice_part(idx);
      }
      return out + "]";
    }
    case Expr::Kind::Attribute: {
      const Expr& base = e.args[0];
      std::string b = wrap(base, kPrimary);
      if (base.kind == Expr::Kind::NumberLit && b.find_first_of(".e") == std::string::npos) b = "(" + b + ")";
      return b + "." + e.text;
    }
    case Expr::Kind::Call: {
      std::string out = wrap(e.args[0], kPrimary) + "(";
      bool first = true;
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (!first) out += ", ";
        out += wrap(e.args[i], kOr);
        first = false;
      }
      for (const auto& kw : e.keywords) {
        if (!first) out += ", ";
        out += kw.name + "=" + wrap(kw.value, kOr);
        first = false;
      }
      return out + ")";
    }
    case Expr::Kind::BinOp: {
      int p = binop_prec(e.text);
      if (e.text == "**") return wrap(e.args[0], kPower + 1) + " ** " + wrap(e.args[1], kUnary);
      return wrap(e.args[0], p) + " " + e.text + " " + wrap(e.args[1], p + 1);
    }
    case Expr::Kind::Compare:
      return wrap(e.args[0], kCompare + 1) + " " + e.text + " " + wrap(e.args[1], kCompare + 1);
    case Expr::Kind::BoolOp: {
      int p = e.text == "or" ? kOr : kAnd;
      std::string out;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += " " + e.text + " ";
        out += wrap(e.args[i], p + 1);
      }
      return out;
    }
    case Expr::Kind::Slice: return emit_slice_part(e);
    case Expr::Kind::Unary:
      if (e.text == "not") return "not " + wrap(e.args[0], kNot);
      {
        std::string operand = wrap(e.args[0], kUnary);
        // Keep "- -1" from collapsing into "--1".
        if (!operand.empty() && (operand[0] == '-' || operand[0] == '+')) operand = "(" + operand + ")";
        return e.text + operand;
      }
  }
  return {};
}

}  // namespace

Ast parse(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.run();
}

std::string quote_string(std::string_view value) {
  bool has_single = value.find('\'') != std::string_view::npos;
  bool has_double = value.find('"') != std::string_view::npos;
  bool has_backslash = value.find('\\') != std::string_view::npos;
  bool has_newline = value.find_first_of("\n\t") != std::string_view::npos;
  char q = has_single && !has_double ? '"' : '\'';
  bool raw_ok = !(has_single && has_double) && !value.ends_with('\\') && !has_newline;
  if (has_backslash && raw_ok) {
    // A raw literal cannot carry a backslash directly before its quote.
    bool clean = true;
    for (std::size_t i = 0; i + 1 < value.size(); ++i)
      if (value[i] == '\\' && value[i + 1] == q) clean = false;
    if (clean) return "r" + std::string(1, q) + std::string(value) + q;
  }
  std::string out(1, q);
  for (char c : value) {
    if (c == '\\') out += "\\\\";
    else if (c == q) out += std::string("\\") + q;
    else if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else out += c;
  }
  return out + q;
}

std::string emit(const Expr& expr) { return wrap(expr, 0); }

std::string emit(const Ast& ast) {
  std::string out;
  for (std::size_t i = 0; i < ast.statements.size(); ++i) {
    const auto& s = ast.statements[i];
    if (i) out += '\n';
    if (s.kind == Stmt::Kind::Assign) out += emit_expr(*s.target, 0) + " = ";
    out += emit_expr(s.value, 0);
  }
  return out;
}

bool is_noop_print(const Stmt& stmt, std::string_view frame_name) {
  if (stmt.kind != Stmt::Kind::ExprStmt) return false;
  const Expr& v = stmt.value;
  return v.kind == Expr::Kind::Call && v.args.size() == 2 && v.keywords.empty() &&
         v.args[0].kind == Expr::Kind::Name && v.args[0].text == "print" &&
         v.args[1].kind == Expr::Kind::Name && v.args[1].text == frame_name;
}

}  // namespace nl2grid::object
