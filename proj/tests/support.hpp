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


// Fixture access and hand-rolled random generators shared by the test
// programs. Generators are seeded explicitly so failures reproduce.

#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nl2grid/error.hpp"
#include "nl2grid/interp.hpp"
#include "nl2grid/table.hpp"
#include "nl2grid/tcr.hpp"

#ifndef NL2GRID_TEST_DATA
#define NL2GRID_TEST_DATA "tests"
#endif

namespace testsupport {

using namespace nl2grid;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& rel) { return std::string(NL2GRID_TEST_DATA) + "/" + rel; }

inline Table fixture(const std::string& name) { return parse_csv(read_file(data_path("fixtures/" + name + ".csv"))); }
inline Table superbowl() { return fixture("superbowl"); }
inline Table astronauts() { return fixture("astronauts"); }
inline Table houses() { return fixture("houses"); }

inline tcr::Schema schema_of(const Table& t) { return tcr::Schema::from_table(t); }

inline const Column& column(const TabularOutput& o, std::size_t i = 0) {
  if (const auto* cols = std::get_if<std::vector<Column>>(&o.payload)) return cols->at(i);
  return std::get<Table>(o.payload).columns().at(i);
}

inline const Value& single(const TabularOutput& o) { return std::get<Value>(o.payload); }

/// Code of the nl2grid::Error thrown by f, or nullopt when nothing is thrown.
template <typename F>
std::optional<ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline TabularOutput number_column(std::vector<std::optional<double>> cells, std::string name = "c") {
  Column c{std::move(name), {CellType::Number, false}, {}};
  for (auto& v : cells) c.cells.push_back(v ? Value::number(*v) : Value::missing());
  return TabularOutput::new_columns({std::move(c)});
}

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}
  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v.at(static_cast<std::size_t>(below(static_cast<int>(v.size()))));
  }
  std::mt19937& engine() { return gen_; }

 private:
  std::mt19937 gen_;
};

// ---------------------------------------------------------------------------
// Random tables for CSV round trips.

inline Value random_cell(Rng& r, CellType t) {
  static const std::vector<std::string> words = {"alpha", "Beta gamma", "o'hara", "say \"hi\"", "a,b", "x y z",
                                                 "naïve", "STS-119 (Discovery), ISS-31/32 (Soyuz)", "end."};
  switch (t) {
    case CellType::Number: {
      static const std::vector<double> nums = {0, 1, -2, 3.5, 1653.5, 1e-3, 42, 98178, -122.257, 1001.25};
      return Value::number(r.pick(nums) + r.below(1000));
    }
    case CellType::Text: return Value::text(r.pick(words));
    case CellType::Bool: return Value::boolean(r.chance(0.5));
    case CellType::Date: return Value::date(Date(r.below(40000) - 10000 + 9000));
  }
  return Value::missing();
}

inline Table random_table(Rng& r) {
  static const std::vector<CellType> types = {CellType::Number, CellType::Text, CellType::Bool, CellType::Date};
  int ncols = 1 + r.below(5);
  int nrows = 1 + r.below(12);
  std::vector<Column> cols;
  for (int c = 0; c < ncols; ++c) {
    CellType t = r.pick(types);
    Column col{"col " + std::to_string(c) + (r.chance(0.3) ? ", quoted \"x\"" : ""), {t, false}, {}};
    for (int i = 0; i < nrows; ++i) col.cells.push_back(i > 0 && r.chance(0.15) ? Value::missing() : random_cell(r, t));
    cols.push_back(std::move(col));
  }
  return Table("df", std::move(cols));
}

// ---------------------------------------------------------------------------
// Random well-typed programs over a table's schema.

class ProgramGen {
 public:
  ProgramGen(const Table& table, std::uint32_t seed) : table_(table), rng_(seed), schema_(schema_of(table)) {
    for (const auto& c : table.columns()) add_column(c.name, c.type);
    if (texts_.empty() || nums_.empty()) throw std::invalid_argument("ProgramGen needs text and number columns");
  }

  tcr::Program program() {
    tcr::Program p;
    int creates = rng_.below(3);
    for (int i = 0; i < creates; ++i) {
      std::string name = fresh_name();
      tcr::Expr e = valued(2);
      tcr::Type t = tcr::infer_type(e, schema_);
      p.statements.push_back({tcr::Statement::Kind::CreateColumn, name, e});
      schema_.set(name, t.elem);
      add_column(name, t.elem);
    }
    if (creates == 0 || rng_.chance(0.5)) {
      tcr::Expr y = yielded(2);
      // A bare table after new columns is a display no-op in the object code.
      if (creates == 0 || y.kind != tcr::Kind::FrameRef) p.statements.push_back({tcr::Statement::Kind::Yield, "", y});
    }
    return tcr::typecheck(std::move(p), schema_of(table_));
  }

  tcr::Expr num_series(int d) {
    switch (d <= 0 ? 0 : rng_.below(9)) {
      case 0:
      case 1: return tcr::col(rng_.pick(nums_));
      case 2: {
        static const std::vector<tcr::Kind> ops = {tcr::Kind::Add, tcr::Kind::Sub, tcr::Kind::Mul, tcr::Kind::Div};
        tcr::Kind k = rng_.pick(ops);
        tcr::Expr rhs = rng_.chance(0.5) ? num_series(d - 1) : num_literal();
        return rng_.chance(0.2) ? tcr::binary(k, num_literal(), num_series(d - 1)) : tcr::binary(k, num_series(d - 1), rhs);
      }
      case 3: return tcr::pattern_op(tcr::Kind::CountOccurrences, text_series(d - 1), pattern());
      case 4: return tcr::unary_op(tcr::Kind::Len, text_series(d - 1));
      case 5: return tcr::unary_op(tcr::Kind::Len, tcr::split(text_series(d - 1), delimiter()));
      case 6:
        if (!dates_.empty()) return tcr::unary_op(tcr::Kind::DateYear, tcr::col(rng_.pick(dates_)));
        return tcr::col(rng_.pick(nums_));
      case 7: return tcr::binary(tcr::Kind::Add, num_series(d - 1), num_series(d - 1));
      default: return tcr::binary(tcr::Kind::Div, num_series(d - 1), tcr::binary(tcr::Kind::Add, num_series(d - 1), num_literal()));
    }
  }

  tcr::Expr text_series(int d) {
    switch (d <= 0 ? 0 : rng_.below(7)) {
      case 0:
      case 1: return tcr::col(rng_.pick(texts_));
      case 2: return tcr::replace(text_series(d - 1), pattern(), rng_.pick(replacements()));
      case 3: return tcr::unary_op(rng_.chance(0.5) ? tcr::Kind::Lower : tcr::Kind::Strip, text_series(d - 1));
      case 4: return tcr::elem_index(text_series(d - 1), index(), tcr::IndexKind::CharOfText);
      case 5: return tcr::elem_index(tcr::split(text_series(d - 1), delimiter()), index(), tcr::IndexKind::WordOfList);
      default: return tcr::binary(tcr::Kind::Add, text_series(d - 1), tcr::literal(Value::text(rng_.pick(text_values()))));
    }
  }

  tcr::Expr bool_series(int d) {
    static const std::vector<tcr::Kind> cmps = {tcr::Kind::Eq, tcr::Kind::NotEq, tcr::Kind::Gt,
                                                 tcr::Kind::Ge, tcr::Kind::Lt,    tcr::Kind::Le};
    switch (d <= 0 ? rng_.below(3) : rng_.below(7)) {
      case 0: return tcr::binary(rng_.pick(cmps), num_series(d - 1), num_literal());
      case 1:
        return tcr::binary(rng_.chance(0.5) ? tcr::Kind::Eq : tcr::Kind::NotEq, text_series(d - 1),
                           tcr::literal(Value::text(rng_.pick(text_values()))));
      case 2: return tcr::pattern_op(tcr::Kind::Contains, text_series(d - 1), pattern());
      case 3: return tcr::nary(tcr::Kind::And, {bool_series(d - 1), bool_series(d - 1)});
      case 4: return tcr::nary(tcr::Kind::Or, {bool_series(d - 1), bool_series(d - 1)});
      case 5: return tcr::negate(bool_series(d - 1));
      default:
        if (!bools_.empty()) return tcr::col(rng_.pick(bools_));
        return tcr::binary(rng_.pick(cmps), num_series(d - 1), num_series(d - 1));
    }
  }

  tcr::Expr valued(int d) {
    switch (rng_.below(4)) {
      case 0: return text_series(d);
      case 1: return bool_series(d);
      default: return num_series(d);
    }
  }

  tcr::Expr frame(int d) {
    switch (d <= 0 ? 0 : rng_.below(4)) {
      case 0:
      case 1: return tcr::frame_ref();
      case 2: return tcr::row_filter(tcr::frame_ref(), bool_series(d - 1));
      default: {
        int n = static_cast<int>(table_.num_rows());
        std::optional<std::int64_t> lo, hi;
        if (rng_.chance(0.7)) lo = rng_.below(n);
        if (!lo || rng_.chance(0.7)) hi = (lo ? *lo : 0) + 1 + rng_.below(n);
        return tcr::slice_rows(tcr::frame_ref(), lo, hi);
      }
    }
  }

  tcr::Expr yielded(int d) {
    static const std::vector<tcr::Kind> num_aggs = {tcr::Kind::Sum, tcr::Kind::Min, tcr::Kind::Max, tcr::Kind::Mean,
                                                    tcr::Kind::IdxMax};
    switch (rng_.below(12)) {
      case 0: return tcr::unary_op(rng_.pick(num_aggs), tcr::col(frame(d), rng_.pick(nums_)));
      case 1: return tcr::unary_op(tcr::Kind::Count, tcr::col(frame(d), rng_.pick(all_)));
      case 2: return tcr::unary_op(tcr::Kind::RowCount, tcr::row_filter(tcr::frame_ref(), bool_series(d)));
      case 3: return tcr::row_filter(tcr::frame_ref(), bool_series(d));
      case 4: {
        int field = rng_.below(2);
        return tcr::elem_index(tcr::unary_op(tcr::Kind::Shape, tcr::frame_ref()), field, tcr::IndexKind::TupleField,
                               field == 0 ? "rows" : "columns");
      }
      case 5: return tcr::unary_op(tcr::Kind::GroupSize, tcr::group_by(tcr::frame_ref(), {rng_.pick(texts_)}));
      case 6: return tcr::unary_op(tcr::Kind::Transpose, tcr::slice_rows(tcr::frame_ref(), std::nullopt, 3));
      case 7: return tcr::col(tcr::row_filter(tcr::frame_ref(), bool_series(d - 1)), rng_.pick(all_));
      case 8: return valued(d);
      case 9:
        return tcr::binary(tcr::Kind::Div, tcr::unary_op(tcr::Kind::Sum, tcr::col(rng_.pick(nums_))),
                           tcr::unary_op(tcr::Kind::Count, tcr::col(rng_.pick(all_))));
      case 10: return tcr::unary_op(tcr::Kind::Count, tcr::row_filter(tcr::frame_ref(), bool_series(d - 1)));
      default: return frame(d);
    }
  }

 private:
  void add_column(const std::string& name, ElemType t) {
    if (t.list) return;
    all_.push_back(name);
    switch (t.cell) {
      case CellType::Number: nums_.push_back(name); break;
      case CellType::Text: texts_.push_back(name); break;
      case CellType::Bool: bools_.push_back(name); break;
      case CellType::Date: dates_.push_back(name); break;
    }
  }

  std::string fresh_name() {
    static const std::vector<std::string> names = {"Mission Count", "avg", "Hours per Mission", "flag",
                                                   "Total (hr)", "city", "new_house"};
    for (int i = 0;; ++i) {
      std::string n = rng_.pick(names) + (i ? " " + std::to_string(i) : "");
      if (!schema_.contains(n)) return n;
    }
  }

  tcr::Expr num_literal() {
    static const std::vector<double> nums = {0, 1, 2, 3, 1970, 2.5, 0.5, 100, 250000};
    return tcr::literal(Value::number(rng_.pick(nums)));
  }

  std::int64_t index() {
    static const std::vector<std::int64_t> idx = {0, 1, 2, -1, 3};
    return rng_.pick(idx);
  }

  std::string pattern() {
    static const std::vector<std::string> pats = {"STS", ",", "a", "New", " ", "(", "o'", "and", "is"};
    return rng_.pick(pats);
  }

  std::optional<std::string> delimiter() {
    static const std::vector<std::string> delims = {",", " ", "/", "-", ", "};
    if (rng_.chance(0.2)) return std::nullopt;
    return rng_.pick(delims);
  }

  const std::vector<std::string>& replacements() {
    static const std::vector<std::string> r = {"", "-", "X", " and "};
    return r;
  }

  std::vector<std::string> text_values() {
    std::vector<std::string> vals = {"New Orleans", "Active", "x", "it's", "a and b", "", "Retired", "2"};
    for (const auto& c : table_.columns())
      if (c.type.cell == CellType::Text && !c.type.list && !c.cells.empty() && c.cells[0].is_text())
        vals.push_back(c.cells[0].as_text());
    return vals;
  }

  const Table& table_;
  Rng rng_;
  tcr::Schema schema_;
  std::vector<std::string> nums_, texts_, bools_, dates_, all_;
};

}  // namespace testsupport
