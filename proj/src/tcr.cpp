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

#include "nl2grid/tcr.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "nl2grid/error.hpp"

namespace nl2grid::tcr {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Schema and types

Schema Schema::from_table(const Table& table, std::string frame_name) {
  Schema s;
  s.frame_name = std::move(frame_name);
  for (const auto& c : table.columns()) s.columns.emplace_back(c.name, c.type);
  return s;
}

std::optional<ElemType> Schema::find(std::string_view name) const {
  for (const auto& [n, t] : columns)
    if (n == name) return t;
  return std::nullopt;
}

void Schema::set(const std::string& name, ElemType type) {
  for (auto& [n, t] : columns)
    if (n == name) {
      t = type;
      return;
    }
  columns.emplace_back(name, type);
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  for (const auto& [n, t] : columns) out.push_back(n);
  return out;
}

Type Type::frame(bool derived) {
  Type t;
  t.kind = Kind::Frame;
  t.derived = derived;
  return t;
}

Type Type::series(ElemType e) {
  Type t;
  t.kind = Kind::Series;
  t.elem = e;
  return t;
}

Type Type::scalar(ElemType e) {
  Type t;
  t.kind = Kind::Scalar;
  t.elem = e;
  return t;
}

Type Type::labeled_tuple(std::vector<std::string> labels, std::vector<ElemType> fields) {
  Type t;
  t.kind = Kind::LabeledTuple;
  t.labels = std::move(labels);
  t.fields = std::move(fields);
  return t;
}

Type Type::grouped() {
  Type t;
  t.kind = Kind::Grouped;
  return t;
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Unknown: return "Unknown";
    case Type::Kind::Frame: return t.derived ? "Frame(derived)" : "Frame";
    case Type::Kind::Series: return "Series(" + to_string(t.elem) + ")";
    case Type::Kind::Scalar: return "Scalar(" + to_string(t.elem) + ")";
    case Type::Kind::Grouped: return "Grouped";
    case Type::Kind::LabeledTuple: {
      std::string out = "LabeledTuple(";
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (i) out += ", ";
        out += t.labels[i] + ": " + to_string(t.fields[i]);
      }
      return out + ")";
    }
  }
  return "Unknown";
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::FrameRef: return "FrameRef";
    case Kind::VarRef: return "VarRef";
    case Kind::ColProject: return "ColProject";
    case Kind::RowFilter: return "RowFilter";
    case Kind::Eq: return "Eq";
    case Kind::NotEq: return "NotEq";
    case Kind::Gt: return "Gt";
    case Kind::Ge: return "Ge";
    case Kind::Lt: return "Lt";
    case Kind::Le: return "Le";
    case Kind::And: return "And";
    case Kind::Or: return "Or";
    case Kind::Not: return "Not";
    case Kind::Add: return "Add";
    case Kind::Sub: return "Sub";
    case Kind::Mul: return "Mul";
    case Kind::Div: return "Div";
    case Kind::Literal: return "Literal";
    case Kind::LiteralList: return "LiteralList";
    case Kind::Split: return "Split";
    case Kind::Replace: return "Replace";
    case Kind::Lower: return "Lower";
    case Kind::Strip: return "Strip";
    case Kind::CountOccurrences: return "CountOccurrences";
    case Kind::Contains: return "Contains";
    case Kind::Len: return "Len";
    case Kind::ElemIndex: return "ElemIndex";
    case Kind::SliceRows: return "SliceRows";
    case Kind::Sum: return "Sum";
    case Kind::Min: return "Min";
    case Kind::Max: return "Max";
    case Kind::Mean: return "Mean";
    case Kind::Count: return "Count";
    case Kind::RowCount: return "RowCount";
    case Kind::IdxMax: return "IdxMax";
    case Kind::Shape: return "Shape";
    case Kind::GroupBy: return "GroupBy";
    case Kind::GroupSize: return "GroupSize";
    case Kind::Transpose: return "Transpose";
    case Kind::DateYear: return "DateYear";
    case Kind::DateCeil: return "DateCeil";
  }
  return "?";
}

bool is_comparison(Kind k) {
  return k == Kind::Eq || k == Kind::NotEq || k == Kind::Gt || k == Kind::Ge || k == Kind::Lt || k == Kind::Le;
}

bool is_arithmetic(Kind k) { return k == Kind::Add || k == Kind::Sub || k == Kind::Mul || k == Kind::Div; }

bool is_aggregate(Kind k) {
  return k == Kind::Sum || k == Kind::Min || k == Kind::Max || k == Kind::Mean || k == Kind::Count ||
         k == Kind::RowCount || k == Kind::IdxMax;
}

std::string_view to_string(IndexKind k) {
  switch (k) {
    case IndexKind::CharOfText: return "CharOfText";
    case IndexKind::WordOfList: return "WordOfList";
    case IndexKind::ElementOfSeries: return "ElementOfSeries";
    case IndexKind::TupleField: return "TupleField";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Constructors

namespace {

Expr node(Kind k, std::vector<Expr> args = {}) {
  Expr e;
  e.kind = k;
  e.args = std::move(args);
  return e;
}

}  // namespace

Expr frame_ref() { return node(Kind::FrameRef); }

Expr var_ref(std::string name) {
  Expr e = node(Kind::VarRef);
  e.name = std::move(name);
  return e;
}

Expr col(Expr frame, std::string name) {
  Expr e = node(Kind::ColProject, {std::move(frame)});
  e.name = std::move(name);
  return e;
}

Expr col(std::string name) { return col(frame_ref(), std::move(name)); }

Expr row_filter(Expr subject, Expr mask) { return node(Kind::RowFilter, {std::move(subject), std::move(mask)}); }

Expr binary(Kind k, Expr lhs, Expr rhs) { return node(k, {std::move(lhs), std::move(rhs)}); }

Expr nary(Kind k, std::vector<Expr> operands) {
  std::vector<Expr> flat;
  for (auto& op : operands) {
    if (op.kind == k)
      for (auto& inner : op.args) flat.push_back(std::move(inner));
    else
      flat.push_back(std::move(op));
  }
  return node(k, std::move(flat));
}

Expr negate(Expr operand) { return node(Kind::Not, {std::move(operand)}); }

Expr literal(Value v) {
  Expr e = node(Kind::Literal);
  e.literal = std::move(v);
  return e;
}

Expr literal_list(std::vector<Value> values) {
  Expr e = node(Kind::LiteralList);
  e.values = std::move(values);
  return e;
}

Expr split(Expr subject, std::optional<std::string> delimiter) {
  Expr e = node(Kind::Split, {std::move(subject)});
  e.has_pattern = delimiter.has_value();
  if (delimiter) e.pattern = std::move(*delimiter);
  return e;
}

Expr replace(Expr subject, std::string pattern, std::string replacement) {
  Expr e = node(Kind::Replace, {std::move(subject)});
  e.pattern = std::move(pattern);
  e.replacement = std::move(replacement);
  return e;
}

Expr unary_op(Kind k, Expr subject) { return node(k, {std::move(subject)}); }

Expr pattern_op(Kind k, Expr subject, std::string pattern) {
  Expr e = node(k, {std::move(subject)});
  e.pattern = std::move(pattern);
  return e;
}

Expr elem_index(Expr subject, std::int64_t index, IndexKind kind, std::string label) {
  Expr e = node(Kind::ElemIndex, {std::move(subject)});
  e.index = index;
  e.index_kind = kind;
  e.name = std::move(label);
  return e;
}

Expr slice_rows(Expr subject, std::optional<std::int64_t> lo, std::optional<std::int64_t> hi) {
  Expr e = node(Kind::SliceRows, {std::move(subject)});
  e.lo = lo;
  e.hi = hi;
  return e;
}

Expr group_by(Expr frame, std::vector<std::string> keys) {
  Expr e = node(Kind::GroupBy, {std::move(frame)});
  e.keys = std::move(keys);
  return e;
}

Expr date_ceil(Expr subject, std::string unit) {
  Expr e = node(Kind::DateCeil, {std::move(subject)});
  e.name = std::move(unit);
  return e;
}

std::optional<Date> parse_date_literal(std::string_view text) {
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
      int v = 0;
      for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
        v = v * 10 + (text[i] - '0');
      }
      return v;
    };
    auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
    if (!y || !m || !d) return std::nullopt;
    try {
      return Date::from_ymd(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  return parse_date(text);
}

// ---------------------------------------------------------------------------
// Typing

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::TypeMismatch, what); }

bool is_valued(const Type& t) { return t.is_series() || t.is_scalar(); }

Type lift(const std::vector<Expr>& operands, ElemType e) {
  bool any_series = std::any_of(operands.begin(), operands.end(), [](const Expr& x) { return x.type.is_series(); });
  return any_series ? Type::series(e) : Type::scalar(e);
}

const ElemType kNumber{CellType::Number, false};
const ElemType kText{CellType::Text, false};
const ElemType kBool{CellType::Bool, false};
const ElemType kDate{CellType::Date, false};

void require_text_series(const Expr& e, std::string_view op) {
  if (!e.subject().type.is_series() || e.subject().type.elem != kText)
    mismatch(std::string(op) + " expects a text column, found " + to_string(e.subject().type));
}

bool valid_ceil_unit(std::string_view unit) {
  if (unit.empty() || unit.back() != 'D') return false;
  for (std::size_t i = 0; i + 1 < unit.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(unit[i]))) return false;
  return unit.size() == 1 || unit.front() != '0';
}

// Types a node whose children are already typed.
Type compute_type(const Expr& e, const Schema& schema, const Env& env) {
  auto subj = [&]() -> const Type& { return e.subject().type; };
  switch (e.kind) {
    case Kind::FrameRef: return Type::frame();
    case Kind::VarRef: {
      auto it = env.find(e.name);
      if (it == env.end()) throw Error(ErrorCode::UnsupportedApi, "unknown name '" + e.name + "'");
      return it->second;
    }
    case Kind::ColProject: {
      if (!subj().is_frame()) mismatch("column selection expects a table, found " + to_string(subj()));
      if (subj().derived) throw Error(ErrorCode::UnsupportedApi, "column selection on a derived table");
      auto t = schema.find(e.name);
      if (!t) throw Error(ErrorCode::UnknownColumn, "unknown column '" + e.name + "'");
      return Type::series(*t);
    }
    case Kind::RowFilter: {
      const Type& mask = e.args[1].type;
      if (!(subj().is_frame() || subj().is_series()))
        mismatch("row selection expects a table or column, found " + to_string(subj()));
      if (subj().derived) throw Error(ErrorCode::UnsupportedApi, "row selection on a derived table");
      if (!mask.is_series() || mask.elem != kBool)
        mismatch("row selection expects a true/false column, found " + to_string(mask));
      return subj();
    }
    case Kind::Eq:
    case Kind::NotEq:
    case Kind::Gt:
    case Kind::Ge:
    case Kind::Lt:
    case Kind::Le: {
      const Type& l = e.args[0].type;
      const Type& r = e.args[1].type;
      if (!is_valued(l) || !is_valued(r)) mismatch("comparison operands must be values or columns");
      if (l.elem.list || r.elem.list) mismatch("cannot compare lists");
      if (l.elem.cell != r.elem.cell)
        mismatch("cannot compare " + to_string(l.elem) + " with " + to_string(r.elem));
      return lift(e.args, kBool);
    }
    case Kind::And:
    case Kind::Or:
      if (e.args.size() < 2) mismatch("boolean combination needs at least two operands");
      [[fallthrough]];
    case Kind::Not:
      for (const auto& a : e.args)
        if (!is_valued(a.type) || a.type.elem != kBool)
          mismatch("boolean operator expects true/false operands, found " + to_string(a.type));
      return lift(e.args, kBool);
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const Type& l = e.args[0].type;
      const Type& r = e.args[1].type;
      if (!is_valued(l) || !is_valued(r)) mismatch("arithmetic operands must be values or columns");
      if (l.elem == kNumber && r.elem == kNumber) return lift(e.args, kNumber);
      if (e.kind == Kind::Add && l.elem == kText && r.elem == kText) return lift(e.args, kText);
      mismatch("arithmetic on " + to_string(l.elem) + " and " + to_string(r.elem));
    }
    case Kind::Literal: {
      auto t = e.literal.cell_type();
      if (!t) mismatch("literal must be a number, text, true/false or date");
      return Type::scalar({*t, false});
    }
    case Kind::LiteralList: {
      std::optional<CellType> cell;
      for (const auto& v : e.values) {
        if (v.is_missing()) continue;
        auto t = v.cell_type();
        if (!t) mismatch("list literal elements must be scalars");
        if (cell && *cell != *t) mismatch("list literal mixes element types");
        cell = t;
      }
      if (!cell) mismatch("list literal has no typed elements");
      return Type::series({*cell, false});
    }
    case Kind::Split:
      require_text_series(e, "split");
      return Type::series({CellType::Text, true});
    case Kind::Replace:
    case Kind::Lower:
    case Kind::Strip:
      require_text_series(e, to_string(e.kind));
      return Type::series(kText);
    case Kind::CountOccurrences:
      require_text_series(e, "count");
      return Type::series(kNumber);
    case Kind::Contains:
      require_text_series(e, "contains");
      return Type::series(kBool);
    case Kind::Len:
      if (!subj().is_series() || !(subj().elem == kText || subj().elem.list))
        mismatch("len expects a text or list column, found " + to_string(subj()));
      return Type::series(kNumber);
    case Kind::ElemIndex:
      switch (e.index_kind) {
        case IndexKind::CharOfText:
          require_text_series(e, "character access");
          return Type::series(kText);
        case IndexKind::WordOfList:
          if (!subj().is_series() || !subj().elem.list) mismatch("word access expects a list column");
          return Type::series({subj().elem.cell, false});
        case IndexKind::ElementOfSeries:
          if (!subj().is_series()) mismatch("element access expects a column, found " + to_string(subj()));
          return Type::scalar(subj().elem);
        case IndexKind::TupleField: {
          const Type& t = subj();
          if (t.kind != Type::Kind::LabeledTuple) mismatch("field access expects a labeled tuple");
          if (e.index < 0 || e.index >= static_cast<std::int64_t>(t.labels.size()))
            mismatch("tuple index out of range");
          if (t.labels[static_cast<std::size_t>(e.index)] != e.name) mismatch("tuple label does not match index");
          return Type::scalar(t.fields[static_cast<std::size_t>(e.index)]);
        }
      }
      break;
    case Kind::SliceRows:
      if (!(subj().is_frame() || subj().is_series())) mismatch("row slicing expects a table or column");
      if ((e.lo && *e.lo < 0) || (e.hi && *e.hi < 0))
        throw Error(ErrorCode::UnsupportedApi, "negative row slice bounds");
      if (!e.lo && !e.hi) mismatch("row slice needs a bound");
      return subj();
    case Kind::Sum:
    case Kind::Mean:
      if (subj().is_frame()) return Type::frame(true);
      if (!subj().is_series() || !(subj().elem == kNumber || subj().elem == kBool))
        mismatch(std::string(to_string(e.kind)) + " expects a number column, found " + to_string(subj()));
      return Type::scalar(kNumber);
    case Kind::Min:
    case Kind::Max:
      if (subj().is_frame()) return Type::frame(true);
      if (!subj().is_series() || subj().elem.list || subj().elem == kBool)
        mismatch(std::string(to_string(e.kind)) + " expects a number, text or date column");
      return Type::scalar(subj().elem);
    case Kind::Count:
      if (subj().is_frame()) return Type::frame(true);
      if (!subj().is_series()) mismatch("count expects a table or column, found " + to_string(subj()));
      return Type::scalar(kNumber);
    case Kind::RowCount:
      if (!subj().is_frame()) mismatch("number of rows expects a table, found " + to_string(subj()));
      return Type::scalar(kNumber);
    case Kind::IdxMax:
      if (!subj().is_series() || subj().elem != kNumber) mismatch("idxmax expects a number column");
      return Type::scalar(kNumber);
    case Kind::Shape:
      if (!subj().is_frame()) mismatch("shape expects a table");
      return Type::labeled_tuple({"rows", "columns"}, {kNumber, kNumber});
    case Kind::GroupBy:
      if (!subj().is_frame() || subj().derived) mismatch("groupby expects the table");
      if (e.keys.empty()) mismatch("groupby needs at least one key");
      for (const auto& k : e.keys)
        if (!schema.contains(k)) throw Error(ErrorCode::UnknownColumn, "unknown column '" + k + "'");
      return Type::grouped();
    case Kind::GroupSize:
      if (subj().kind != Type::Kind::Grouped) mismatch("size expects a grouping");
      return Type::frame(true);
    case Kind::Transpose:
      if (!subj().is_frame()) mismatch("transpose expects a table");
      return Type::frame(true);
    case Kind::DateYear:
    case Kind::DateCeil:
      if (!subj().is_series() || subj().elem != kDate)
        mismatch("date operation expects a date column, found " + to_string(subj()));
      if (e.kind == Kind::DateCeil && !valid_ceil_unit(e.name))
        throw Error(ErrorCode::UnsupportedApi, "unsupported ceil unit '" + e.name + "'");
      return e.kind == Kind::DateYear ? Type::series(kNumber) : Type::series(kDate);
  }
  mismatch("untypeable node");
}

}  // namespace

void annotate(Expr& expr, const Schema& schema, const Env& env) {
  for (auto& a : expr.args) annotate(a, schema, env);
  expr.type = compute_type(expr, schema, env);
}

Type infer_type(const Expr& expr, const Schema& schema, const Env& env) {
  Expr copy = expr;
  annotate(copy, schema, env);
  return copy.type;
}

namespace {

struct Checker {
  Schema schema;
  Env env;

  void statement(Statement& s, bool last) {
    annotate(s.expr, schema, env);
    const Type& t = s.expr.type;
    switch (s.kind) {
      case Statement::Kind::CreateColumn:
        if (!is_valued(t)) mismatch("a new column needs a column or value, found " + to_string(t));
        schema.set(s.name, t.elem);
        break;
      case Statement::Kind::BindVar:
        if (s.name == schema.frame_name) throw Error(ErrorCode::UnsupportedApi, "reassigning the table");
        env[s.name] = t;
        break;
      case Statement::Kind::Yield:
        if (!last) mismatch("only the final statement may produce a result");
        if (t.kind == Type::Kind::Grouped) throw Error(ErrorCode::UndisplayableOutput, "a grouping must be aggregated");
        break;
    }
  }
};

}  // namespace

Program typecheck(Program program, const Schema& schema) {
  Checker c{schema, {}};
  for (std::size_t i = 0; i < program.statements.size(); ++i)
    c.statement(program.statements[i], i + 1 == program.statements.size());
  return program;
}

Schema extended_schema(const Program& program, const Schema& schema) {
  Schema out = schema;
  for (const auto& s : program.statements)
    if (s.kind == Statement::Kind::CreateColumn) out.set(s.name, s.expr.type.elem);
  return out;
}

// ---------------------------------------------------------------------------
// Translation from object code

namespace {

using OKind = object::Expr::Kind;

enum class Accessor { None, Str, Dt, Loc, Iloc };

struct Translated {
  tcr::Expr expr;
  Accessor accessor = Accessor::None;
};

[[noreturn]] void unsupported_api(const std::string& what, const object::Expr& at) {
  throw Error(ErrorCode::UnsupportedApi, "unsupported API: " + what, at.loc);
}

std::optional<std::int64_t> int_literal(const object::Expr& e) {
  if (e.kind != OKind::NumberLit) return std::nullopt;
  if (std::floor(e.number) != e.number) return std::nullopt;
  return static_cast<std::int64_t>(e.number);
}

class Translator {
 public:
  explicit Translator(const Schema& schema) : original_(schema), schema_(schema) {}

  Program run(const object::Ast& ast) {
    Program p;
    const auto& stmts = ast.statements;
    // Trailing no-op prints do not count when looking for the final statement.
    std::size_t effective_end = stmts.size();
    while (effective_end > 0 && object::is_noop_print(stmts[effective_end - 1], schema_.frame_name))
      --effective_end;
    bool creates = false;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      const auto& s = stmts[i];
      bool last = i + 1 == effective_end;
      if (object::is_noop_print(s, schema_.frame_name)) {
        ++p.dropped_statements;
        continue;
      }
      if (i >= effective_end) continue;
      if (s.kind == object::Stmt::Kind::Assign) {
        p.statements.push_back(assignment(s, p));
        creates = creates || p.statements.back().kind == Statement::Kind::CreateColumn;
        continue;
      }
      const object::Expr* value = &s.value;
      bool is_print = value->kind == OKind::Call && value->args.size() == 2 && value->keywords.empty() &&
                      value->args[0].kind == OKind::Name && value->args[0].text == "print";
      if (is_print) value = &value->args[1];
      if (!last || (creates && value->kind == OKind::Name && value->text == schema_.frame_name)) {
        ++p.dropped_statements;
        continue;
      }
      Translated t = expr(*value);
      finish_accessor(t, *value);
      if (t.expr.type.kind == Type::Kind::Grouped)
        throw Error(ErrorCode::UndisplayableOutput, "a grouping must be aggregated", value->loc);
      p.statements.push_back({Statement::Kind::Yield, "", std::move(t.expr)});
    }
    return p;
  }

 private:
  Statement assignment(const object::Stmt& s, Program& p) {
    const object::Expr& target = *s.target;
    Translated v = expr(s.value);
    finish_accessor(v, s.value);
    if (target.kind == OKind::Subscript && target.args[0].kind == OKind::Name &&
        target.args[0].text == schema_.frame_name && target.args[1].kind == OKind::StringLit) {
      const std::string& name = target.args[1].text;
      if (!is_valued(v.expr.type))
        throw Error(ErrorCode::TypeMismatch, "a new column needs a column or value, found " + to_string(v.expr.type),
                    s.value.loc);
      if (original_.contains(name) &&
          std::find(p.overwrites.begin(), p.overwrites.end(), name) == p.overwrites.end())
        p.overwrites.push_back(name);
      schema_.set(name, v.expr.type.elem);
      return {Statement::Kind::CreateColumn, name, std::move(v.expr)};
    }
    if (target.kind == OKind::Name) {
      if (target.text == schema_.frame_name) unsupported_api("reassigning the table", target);
      if (v.expr.type.kind == Type::Kind::Grouped) unsupported_api("binding a grouping", target);
      env_[target.text] = v.expr.type;
      return {Statement::Kind::BindVar, target.text, std::move(v.expr)};
    }
    unsupported_api("assignment to " + object::emit(target), target);
  }

  tcr::Expr typed(tcr::Expr e, const object::Expr& at) {
    try {
      e.type = compute_type(e, schema_, env_);
    } catch (const Error& err) {
      if (err.location()) throw;
      throw Error(err.code(), err.what(), at.loc);
    }
    return e;
  }

  void finish_accessor(const Translated& t, const object::Expr& at) {
    if (t.accessor != Accessor::None) unsupported_api("bare accessor '" + object::emit(at) + "'", at);
  }

  tcr::Expr value(const object::Expr& e) {
    Translated t = expr(e);
    finish_accessor(t, e);
    return std::move(t.expr);
  }

  static tcr::Expr coerce_date(tcr::Expr lit, const tcr::Expr& other) {
    if (lit.kind == Kind::Literal && lit.literal.is_text() && other.type.elem == ElemType{CellType::Date, false} &&
        (other.type.is_series() || other.type.is_scalar())) {
      if (auto d = parse_date_literal(lit.literal.as_text())) {
        lit.literal = Value::date(*d);
        lit.type = Type::scalar({CellType::Date, false});
      }
    }
    return lit;
  }

  Translated expr(const object::Expr& e) {
    switch (e.kind) {
      case OKind::Name: {
        if (e.text == schema_.frame_name) return {typed(frame_ref(), e)};
        if (e.text == "True" || e.text == "False") return {typed(literal(Value::boolean(e.text == "True")), e)};
        if (env_.find(e.text) != env_.end()) return {typed(var_ref(e.text), e)};
        unsupported_api("unknown name '" + e.text + "'", e);
      }
      case OKind::StringLit: return {typed(literal(Value::text(e.text)), e)};
      case OKind::NumberLit: return {typed(literal(Value::number(e.number)), e)};
      case OKind::ListLit: {
        std::vector<Value> values;
        for (const auto& item : e.args) {
          if (item.kind == OKind::NumberLit) values.push_back(Value::number(item.number));
          else if (item.kind == OKind::StringLit) values.push_back(Value::text(item.text));
          else if (item.kind == OKind::Name && (item.text == "True" || item.text == "False"))
            values.push_back(Value::boolean(item.text == "True"));
          else if (item.kind == OKind::Name && item.text == "None")
            values.push_back(Value::missing());
          else
            unsupported_api("non-literal list element", item);
        }
        return {typed(literal_list(std::move(values)), e)};
      }
      case OKind::TupleLit: unsupported_api("tuple value", e);
      case OKind::Slice: unsupported_api("slice outside a subscript", e);
      case OKind::Attribute: return attribute(e);
      case OKind::Call: return call_expr(e);
      case OKind::Subscript: return subscript(e);
      case OKind::BinOp: {
        static const std::map<std::string, Kind, std::less<>> ops = {
            {"+", Kind::Add}, {"-", Kind::Sub}, {"*", Kind::Mul}, {"/", Kind::Div}, {"&", Kind::And}, {"|", Kind::Or}};
        auto it = ops.find(e.text);
        if (it == ops.end()) unsupported_api("operator '" + e.text + "'", e);
        tcr::Expr l = value(e.args[0]);
        tcr::Expr r = value(e.args[1]);
        if (it->second == Kind::And || it->second == Kind::Or)
          return {typed(nary(it->second, {std::move(l), std::move(r)}), e)};
        return {typed(binary(it->second, std::move(l), std::move(r)), e)};
      }
      case OKind::Compare: {
        static const std::map<std::string, Kind, std::less<>> ops = {{"==", Kind::Eq}, {"!=", Kind::NotEq},
                                                                     {">", Kind::Gt},  {">=", Kind::Ge},
                                                                     {"<", Kind::Lt},  {"<=", Kind::Le}};
        tcr::Expr l = value(e.args[0]);
        tcr::Expr r = value(e.args[1]);
        r = coerce_date(std::move(r), l);
        l = coerce_date(std::move(l), r);
        return {typed(binary(ops.at(e.text), std::move(l), std::move(r)), e)};
      }
      case OKind::BoolOp: {
        std::vector<tcr::Expr> operands;
        for (const auto& a : e.args) {
          operands.push_back(value(a));
          if (operands.back().type.is_series())
            throw Error(ErrorCode::TypeMismatch, "'" + e.text + "' on a column is ambiguous; combine masks with & or |",
                        a.loc);
        }
        return {typed(nary(e.text == "and" ? Kind::And : Kind::Or, std::move(operands)), e)};
      }
      case OKind::Unary: {
        if (e.text == "~" || e.text == "not") {
          tcr::Expr operand = value(e.args[0]);
          if (e.text == "not" && operand.type.is_series())
            throw Error(ErrorCode::TypeMismatch, "'not' on a column is ambiguous; use ~", e.loc);
          return {typed(negate(std::move(operand)), e)};
        }
        if (e.text == "+") return expr(e.args[0]);
        unsupported_api("unary '" + e.text + "'", e);
      }
    }
    unsupported_api("expression", e);
  }

  Translated attribute(const object::Expr& e) {
    const object::Expr& base_src = e.args[0];
    if (base_src.kind == OKind::Name && base_src.text != schema_.frame_name && env_.find(base_src.text) == env_.end())
      unsupported_api(base_src.text + "." + e.text, e);
    Translated base = expr(base_src);
    const std::string& attr = e.text;
    const Type& t = base.expr.type;
    if (base.accessor == Accessor::Dt && attr == "year") return {typed(unary_op(Kind::DateYear, std::move(base.expr)), e)};
    if (base.accessor != Accessor::None) unsupported_api("attribute '" + attr + "' on an accessor", e);
    if (attr == "str") {
      if (!t.is_series() || !(t.elem == kText || t.elem.list))
        throw Error(ErrorCode::TypeMismatch, ".str expects a text column, found " + to_string(t), e.loc);
      return {std::move(base.expr), Accessor::Str};
    }
    if (attr == "dt") {
      if (!t.is_series() || t.elem != kDate)
        throw Error(ErrorCode::TypeMismatch, ".dt expects a date column, found " + to_string(t), e.loc);
      return {std::move(base.expr), Accessor::Dt};
    }
    if (attr == "loc" || attr == "iloc") {
      if (!(t.is_frame() || t.is_series()))
        throw Error(ErrorCode::TypeMismatch, "." + attr + " expects a table or column", e.loc);
      return {std::move(base.expr), attr == "loc" ? Accessor::Loc : Accessor::Iloc};
    }
    if (attr == "shape") return {typed(unary_op(Kind::Shape, std::move(base.expr)), e)};
    if (attr == "T") return {typed(unary_op(Kind::Transpose, std::move(base.expr)), e)};
    if (t.is_frame() && !t.derived && schema_.contains(attr)) return {typed(col(std::move(base.expr), attr), e)};
    unsupported_api("attribute '" + attr + "'", e);
  }

  std::string string_arg(const object::Expr& call, std::size_t i, const std::string& method) {
    if (call.args.size() <= i || call.args[i].kind != OKind::StringLit)
      throw Error(ErrorCode::TypeMismatch, method + " expects a text literal argument", call.loc);
    return call.args[i].text;
  }

  void arity(const object::Expr& call, std::size_t n, const std::string& method) {
    if (!call.keywords.empty()) unsupported_api(method + " with keyword '" + call.keywords.front().name + "'", call);
    if (call.args.size() - 1 != n)
      throw Error(ErrorCode::TypeMismatch, method + " expects " + std::to_string(n) + " argument(s)", call.loc);
  }

  Translated call_expr(const object::Expr& e) {
    const object::Expr& callee = e.args[0];
    if (callee.kind == OKind::Name) {
      if (callee.text == "len") {
        arity(e, 1, "len");
        tcr::Expr subject = value(e.args[1]);
        if (subject.type.is_frame()) return {typed(unary_op(Kind::RowCount, std::move(subject)), e)};
        unsupported_api("len of " + to_string(subject.type), e);
      }
      unsupported_api("function '" + callee.text + "'", e);
    }
    if (callee.kind != OKind::Attribute) unsupported_api("call of " + object::emit(callee), e);
    const object::Expr& base_src = callee.args[0];
    if (base_src.kind == OKind::Name && base_src.text != schema_.frame_name && env_.find(base_src.text) == env_.end())
      unsupported_api(base_src.text + "." + callee.text, e);
    Translated base = expr(base_src);
    const std::string& m = callee.text;
    const Type& t = base.expr.type;

    if (base.accessor == Accessor::Str) {
      if (m == "split") {
        if (!e.keywords.empty()) unsupported_api("split with keyword '" + e.keywords.front().name + "'", e);
        if (e.args.size() == 1) return {typed(split(std::move(base.expr), std::nullopt), e)};
        arity(e, 1, "split");
        return {typed(split(std::move(base.expr), string_arg(e, 1, "split")), e)};
      }
      if (m == "replace") {
        arity(e, 2, "replace");
        return {typed(replace(std::move(base.expr), string_arg(e, 1, m), string_arg(e, 2, m)), e)};
      }
      if (m == "count" || m == "contains") {
        arity(e, 1, m);
        return {typed(pattern_op(m == "count" ? Kind::CountOccurrences : Kind::Contains, std::move(base.expr),
                                 string_arg(e, 1, m)),
                      e)};
      }
      if (m == "lower" || m == "strip" || m == "len") {
        arity(e, 0, m);
        Kind k = m == "lower" ? Kind::Lower : m == "strip" ? Kind::Strip : Kind::Len;
        return {typed(unary_op(k, std::move(base.expr)), e)};
      }
      unsupported_api("str." + m, e);
    }
    if (base.accessor == Accessor::Dt) {
      if (m == "ceil") {
        arity(e, 1, m);
        return {typed(date_ceil(std::move(base.expr), string_arg(e, 1, m)), e)};
      }
      unsupported_api("dt." + m, e);
    }
    if (base.accessor != Accessor::None) unsupported_api(m + " on an indexer", e);

    static const std::map<std::string, Kind, std::less<>> aggregates = {
        {"sum", Kind::Sum}, {"min", Kind::Min},     {"max", Kind::Max},
        {"mean", Kind::Mean}, {"count", Kind::Count}, {"idxmax", Kind::IdxMax}};
    if (auto it = aggregates.find(m); it != aggregates.end() && (t.is_series() || t.is_frame())) {
      arity(e, 0, m);
      if (t.is_frame() && it->second == Kind::IdxMax) unsupported_api("idxmax over a table", e);
      return {typed(unary_op(it->second, std::move(base.expr)), e)};
    }
    if (t.is_frame() && m == "groupby") {
      arity(e, 1, m);
      const object::Expr& key = e.args[1];
      std::vector<std::string> keys;
      if (key.kind == OKind::StringLit) {
        keys.push_back(key.text);
      } else if (key.kind == OKind::ListLit) {
        for (const auto& k : key.args) {
          if (k.kind != OKind::StringLit) throw Error(ErrorCode::TypeMismatch, "groupby keys must be column names", k.loc);
          keys.push_back(k.text);
        }
      } else {
        throw Error(ErrorCode::TypeMismatch, "groupby keys must be column names", key.loc);
      }
      return {typed(group_by(std::move(base.expr), std::move(keys)), e)};
    }
    if (t.is_frame() && m == "transpose") {
      arity(e, 0, m);
      return {typed(unary_op(Kind::Transpose, std::move(base.expr)), e)};
    }
    if (t.kind == Type::Kind::Grouped && m == "size") {
      arity(e, 0, m);
      return {typed(unary_op(Kind::GroupSize, std::move(base.expr)), e)};
    }
    unsupported_api("method '" + m + "'", e);
  }

  std::optional<std::int64_t> slice_bound(const object::Expr& s, bool hi) {
    bool present = hi ? s.has_hi : s.has_lo;
    if (!present) return std::nullopt;
    auto v = int_literal(s.args[hi ? 1 : 0]);
    if (!v) throw Error(ErrorCode::TypeMismatch, "slice bounds must be integer literals", s.loc);
    return v;
  }

  Translated slice_of(tcr::Expr base, const object::Expr& s, const object::Expr& at) {
    return {typed(slice_rows(std::move(base), slice_bound(s, false), slice_bound(s, true)), at)};
  }

  Translated mask_filter(tcr::Expr base, const object::Expr& index, const object::Expr& at) {
    tcr::Expr mask = value(index);
    if (!mask.type.is_series() || mask.type.elem != kBool)
      throw Error(ErrorCode::TypeMismatch, "row selection expects a true/false column, found " + to_string(mask.type),
                  index.loc);
    return {typed(row_filter(std::move(base), std::move(mask)), at)};
  }

  Translated element(tcr::Expr base, std::int64_t i, const object::Expr& at) {
    return {typed(elem_index(std::move(base), i, IndexKind::ElementOfSeries), at)};
  }

  Translated subscript(const object::Expr& e) {
    Translated base = expr(e.args[0]);
    const object::Expr& index = e.args[1];
    const Type& t = base.expr.type;
    auto as_int = int_literal(index);

    switch (base.accessor) {
      case Accessor::Str:
        if (!as_int) unsupported_api("str[] with a non-integer index", e);
        return {typed(elem_index(std::move(base.expr), *as_int,
                                 t.elem.list ? IndexKind::WordOfList : IndexKind::CharOfText),
                      e)};
      case Accessor::Dt: unsupported_api("dt[]", e);
      case Accessor::Iloc:
        if (index.kind == OKind::Slice) return slice_of(std::move(base.expr), index, e);
        if (as_int && t.is_series()) return element(std::move(base.expr), *as_int, e);
        unsupported_api("iloc[" + object::emit(index) + "] on " + to_string(t), e);
      case Accessor::Loc:
        if (index.kind == OKind::TupleLit && index.args.size() == 2 && t.is_frame() &&
            index.args[1].kind == OKind::StringLit) {
          const object::Expr& rows = index.args[0];
          const std::string& column = index.args[1].text;
          if (rows.kind == OKind::Slice && !rows.has_lo && !rows.has_hi)
            return {typed(col(std::move(base.expr), column), e)};
          if (auto r = int_literal(rows)) return element(typed(col(std::move(base.expr), column), e), *r, e);
          Translated filtered = mask_filter(std::move(base.expr), rows, e);
          return {typed(col(std::move(filtered.expr), column), e)};
        }
        if (as_int && t.is_series()) return element(std::move(base.expr), *as_int, e);
        if (index.kind != OKind::Slice && index.kind != OKind::TupleLit && !as_int)
          return mask_filter(std::move(base.expr), index, e);
        unsupported_api("loc[" + object::emit(index) + "]", e);
      case Accessor::None: break;
    }

    if (t.is_frame()) {
      if (index.kind == OKind::StringLit) return {typed(col(std::move(base.expr), index.text), e)};
      if (index.kind == OKind::Slice) return slice_of(std::move(base.expr), index, e);
      if (index.kind == OKind::ListLit) unsupported_api("multi-column selection", e);
      if (as_int) unsupported_api("integer column label", e);
      return mask_filter(std::move(base.expr), index, e);
    }
    if (t.is_series()) {
      if (as_int) return element(std::move(base.expr), *as_int, e);
      if (index.kind == OKind::Slice) return slice_of(std::move(base.expr), index, e);
      if (index.kind == OKind::StringLit) unsupported_api("label lookup on a column", e);
      return mask_filter(std::move(base.expr), index, e);
    }
    if (t.kind == Type::Kind::LabeledTuple) {
      if (!as_int || *as_int < 0 || *as_int >= static_cast<std::int64_t>(t.labels.size()))
        throw Error(ErrorCode::TypeMismatch, "tuple index must be a constant in range", index.loc);
      const tcr::Expr& inner = base.expr;
      if (inner.kind == Kind::Shape && *as_int == 0 && inner.subject().kind == Kind::RowFilter)
        return {typed(unary_op(Kind::RowCount, inner.subject()), e)};
      std::string label = t.labels[static_cast<std::size_t>(*as_int)];
      return {typed(elem_index(std::move(base.expr), *as_int, IndexKind::TupleField, std::move(label)), e)};
    }
    throw Error(ErrorCode::AmbiguousSubscript, "cannot resolve subscript on " + to_string(t), e.loc);
  }

  Schema original_;
  Schema schema_;
  Env env_;
};

}  // namespace

Program translate(const object::Ast& ast, const Schema& schema) {
  Translator t(schema);
  return t.run(ast);
}

Program translate_source(std::string_view source, const Schema& schema) {
  return translate(object::parse(source), schema);
}

// ---------------------------------------------------------------------------
// Rendering back to object code

namespace {

object::Expr literal_expr(const Value& v) {
  if (v.is_number()) return object::number_lit(v.as_number());
  if (v.is_text()) return object::string_lit(v.as_text());
  if (v.is_bool()) return object::name(v.as_bool() ? "True" : "False");
  if (v.is_date()) return object::string_lit(v.as_date().iso());
  if (v.is_missing()) return object::name("None");
  std::vector<object::Expr> items;
  for (const auto& item : v.as_list()) items.push_back(literal_expr(item));
  return object::list_lit(std::move(items));
}

std::string_view op_text(Kind k) {
  switch (k) {
    case Kind::Eq: return "==";
    case Kind::NotEq: return "!=";
    case Kind::Gt: return ">";
    case Kind::Ge: return ">=";
    case Kind::Lt: return "<";
    case Kind::Le: return "<=";
    case Kind::Add: return "+";
    case Kind::Sub: return "-";
    case Kind::Mul: return "*";
    case Kind::Div: return "/";
    case Kind::And: return "&";
    case Kind::Or: return "|";
    default: return "?";
  }
}

std::string_view method_name(Kind k) {
  switch (k) {
    case Kind::Sum: return "sum";
    case Kind::Min: return "min";
    case Kind::Max: return "max";
    case Kind::Mean: return "mean";
    case Kind::Count: return "count";
    case Kind::IdxMax: return "idxmax";
    case Kind::Lower: return "lower";
    case Kind::Strip: return "strip";
    case Kind::Len: return "len";
    case Kind::GroupSize: return "size";
    case Kind::Transpose: return "transpose";
    default: return "?";
  }
}

object::Expr str_of(object::Expr e) { return object::attribute(std::move(e), "str"); }

}  // namespace

object::Expr to_object(const Expr& e, const Schema& schema) {
  auto sub = [&](std::size_t i = 0) { return to_object(e.args[i], schema); };
  switch (e.kind) {
    case Kind::FrameRef: return object::name(schema.frame_name);
    case Kind::VarRef: return object::name(e.name);
    case Kind::ColProject: return object::subscript(sub(), object::string_lit(e.name));
    case Kind::RowFilter: return object::subscript(sub(0), sub(1));
    case Kind::Eq:
    case Kind::NotEq:
    case Kind::Gt:
    case Kind::Ge:
    case Kind::Lt:
    case Kind::Le: return object::compare(std::string(op_text(e.kind)), sub(0), sub(1));
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: return object::binop(std::string(op_text(e.kind)), sub(0), sub(1));
    case Kind::And:
    case Kind::Or: {
      object::Expr acc = sub(0);
      for (std::size_t i = 1; i < e.args.size(); ++i)
        acc = object::binop(std::string(op_text(e.kind)), std::move(acc), sub(i));
      return acc;
    }
    case Kind::Not: return object::unary("~", sub());
    case Kind::Literal: return literal_expr(e.literal);
    case Kind::LiteralList: {
      std::vector<object::Expr> items;
      for (const auto& v : e.values) items.push_back(literal_expr(v));
      return object::list_lit(std::move(items));
    }
    case Kind::Split: {
      std::vector<object::Expr> args;
      if (e.has_pattern) args.push_back(object::string_lit(e.pattern));
      return object::method(str_of(sub()), "split", std::move(args));
    }
    case Kind::Replace:
      return object::method(str_of(sub()), "replace",
                            {object::string_lit(e.pattern), object::string_lit(e.replacement)});
    case Kind::CountOccurrences: return object::method(str_of(sub()), "count", {object::string_lit(e.pattern)});
    case Kind::Contains: return object::method(str_of(sub()), "contains", {object::string_lit(e.pattern)});
    case Kind::Lower:
    case Kind::Strip:
    case Kind::Len: return object::method(str_of(sub()), std::string(method_name(e.kind)));
    case Kind::ElemIndex: {
      auto idx = object::number_lit(static_cast<double>(e.index));
      switch (e.index_kind) {
        case IndexKind::CharOfText:
        case IndexKind::WordOfList: return object::subscript(str_of(sub()), std::move(idx));
        case IndexKind::ElementOfSeries: return object::subscript(object::attribute(sub(), "iloc"), std::move(idx));
        case IndexKind::TupleField: return object::subscript(sub(), std::move(idx));
      }
      break;
    }
    case Kind::SliceRows: {
      std::optional<object::Expr> lo, hi;
      if (e.lo) lo = object::number_lit(static_cast<double>(*e.lo));
      if (e.hi) hi = object::number_lit(static_cast<double>(*e.hi));
      return object::subscript(object::attribute(sub(), "iloc"), object::slice(std::move(lo), std::move(hi)));
    }
    case Kind::Sum:
    case Kind::Min:
    case Kind::Max:
    case Kind::Mean:
    case Kind::Count:
    case Kind::IdxMax:
    case Kind::GroupSize:
    case Kind::Transpose: return object::method(sub(), std::string(method_name(e.kind)));
    case Kind::RowCount:
      if (e.subject().kind == Kind::RowFilter)
        return object::subscript(object::attribute(sub(), "shape"), object::number_lit(0));
      return object::call(object::name("len"), {sub()});
    case Kind::Shape: return object::attribute(sub(), "shape");
    case Kind::GroupBy: {
      if (e.keys.size() == 1) return object::method(sub(), "groupby", {object::string_lit(e.keys.front())});
      std::vector<object::Expr> keys;
      for (const auto& k : e.keys) keys.push_back(object::string_lit(k));
      return object::method(sub(), "groupby", {object::list_lit(std::move(keys))});
    }
    case Kind::DateYear: return object::attribute(object::attribute(sub(), "dt"), "year");
    case Kind::DateCeil:
      return object::method(object::attribute(sub(), "dt"), "ceil", {object::string_lit(e.name)});
  }
  return object::name("None");
}

object::Ast to_object(const Program& program, const Schema& schema) {
  object::Ast ast;
  for (const auto& s : program.statements) {
    object::Stmt st;
    st.value = to_object(s.expr, schema);
    switch (s.kind) {
      case Statement::Kind::CreateColumn:
        st.kind = object::Stmt::Kind::Assign;
        st.target = object::subscript(object::name(schema.frame_name), object::string_lit(s.name));
        break;
      case Statement::Kind::BindVar:
        st.kind = object::Stmt::Kind::Assign;
        st.target = object::name(s.name);
        break;
      case Statement::Kind::Yield: st.kind = object::Stmt::Kind::ExprStmt; break;
    }
    ast.statements.push_back(std::move(st));
  }
  return ast;
}

std::string render_code(const Program& program, const Schema& schema) {
  return object::emit(to_object(program, schema));
}

// ---------------------------------------------------------------------------
// Binding inlining

namespace {

void substitute(Expr& e, const std::map<std::string, Expr>& bound) {
  if (e.kind == Kind::VarRef) {
    if (auto it = bound.find(e.name); it != bound.end()) {
      e = it->second;
      return;
    }
  }
  for (auto& a : e.args) substitute(a, bound);
  // Inlining a mask binding into a boolean chain must keep the chain flat.
  if (e.kind == Kind::And || e.kind == Kind::Or) {
    Type t = e.type;
    e = nary(e.kind, std::move(e.args));
    e.type = t;
  }
}

}  // namespace

Program inline_bindings(const Program& program) {
  Program out;
  out.dropped_statements = program.dropped_statements;
  out.overwrites = program.overwrites;
  std::map<std::string, Expr> bound;
  for (const auto& s : program.statements) {
    Statement copy = s;
    substitute(copy.expr, bound);
    if (s.kind == Statement::Kind::BindVar) {
      bound[s.name] = std::move(copy.expr);
      continue;
    }
    out.statements.push_back(std::move(copy));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON dump

namespace {

json value_json(const Value& v) {
  if (v.is_missing()) return nullptr;
  if (v.is_number()) return v.as_number();
  if (v.is_text()) return v.as_text();
  if (v.is_bool()) return v.as_bool();
  if (v.is_date()) return json{{"date", v.as_date().iso()}};
  json arr = json::array();
  for (const auto& item : v.as_list()) arr.push_back(value_json(item));
  return arr;
}

json expr_json(const Expr& e) {
  json j;
  j["kind"] = std::string(to_string(e.kind));
  j["type"] = to_string(e.type);
  switch (e.kind) {
    case Kind::ColProject:
    case Kind::VarRef: j["name"] = e.name; break;
    case Kind::Literal: j["value"] = value_json(e.literal); break;
    case Kind::LiteralList: {
      json arr = json::array();
      for (const auto& v : e.values) arr.push_back(value_json(v));
      j["values"] = arr;
      break;
    }
    case Kind::Split:
      if (e.has_pattern) j["delimiter"] = e.pattern;
      break;
    case Kind::Replace:
      j["pattern"] = e.pattern;
      j["replacement"] = e.replacement;
      break;
    case Kind::CountOccurrences:
    case Kind::Contains: j["pattern"] = e.pattern; break;
    case Kind::ElemIndex:
      j["index"] = e.index;
      j["index_kind"] = std::string(to_string(e.index_kind));
      if (e.index_kind == IndexKind::TupleField) j["label"] = e.name;
      break;
    case Kind::SliceRows:
      j["lo"] = e.lo ? json(*e.lo) : json(nullptr);
      j["hi"] = e.hi ? json(*e.hi) : json(nullptr);
      break;
    case Kind::GroupBy: j["keys"] = e.keys; break;
    case Kind::DateCeil: j["unit"] = e.name; break;
    default: break;
  }
  if (!e.args.empty()) {
    json kids = json::array();
    for (const auto& a : e.args) kids.push_back(expr_json(a));
    j["children"] = kids;
  }
  return j;
}

}  // namespace

std::string to_json(const Program& program, int indent) {
  json stmts = json::array();
  for (const auto& s : program.statements) {
    json j;
    switch (s.kind) {
      case Statement::Kind::CreateColumn: j["kind"] = "CreateColumn"; break;
      case Statement::Kind::BindVar: j["kind"] = "BindVar"; break;
      case Statement::Kind::Yield: j["kind"] = "Yield"; break;
    }
    if (s.kind != Statement::Kind::Yield) j["name"] = s.name;
    j["expr"] = expr_json(s.expr);
    stmts.push_back(j);
  }
  json root{{"statements", stmts},
            {"dropped_statements", program.dropped_statements},
            {"overwrites", program.overwrites}};
  return root.dump(indent);
}

}  // namespace nl2grid::tcr
