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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nl2grid {

enum class CellType { Number, Text, Bool, Date };

std::string_view to_string(CellType t);

/// Element type of a column or series. `list` marks list-of-values cells
/// (only produced by text splitting); `cell` is then the element type.
struct ElemType {
  CellType cell = CellType::Text;
  bool list = false;

  bool operator==(const ElemType&) const = default;
};

std::string to_string(ElemType t);

/// Calendar date stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  /// Throws Error(InvalidArgument) for an invalid calendar date.
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::int32_t days() const noexcept { return days_; }
  int year() const;
  unsigned month() const;
  unsigned day() const;

  /// "YYYY-MM-DD"
  std::string iso() const;

  auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

struct Missing {
  bool operator==(const Missing&) const = default;
};

/// A single cell. Missing is a value state, not a type.
class Value {
 public:
  using List = std::vector<Value>;
  using Storage = std::variant<Missing, double, std::string, bool, Date, List>;

  Value() = default;
  static Value missing() { return Value(); }
  static Value number(double d) { return Value(Storage(d)); }
  static Value text(std::string s) { return Value(Storage(std::move(s))); }
  static Value boolean(bool b) { return Value(Storage(b)); }
  static Value date(Date d) { return Value(Storage(d)); }
  static Value list(List items) { return Value(Storage(std::move(items))); }

  bool is_missing() const { return std::holds_alternative<Missing>(v_); }
  bool is_number() const { return std::holds_alternative<double>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_date() const { return std::holds_alternative<Date>(v_); }
  bool is_list() const { return std::holds_alternative<List>(v_); }

  double as_number() const { return std::get<double>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  Date as_date() const { return std::get<Date>(v_); }
  const List& as_list() const { return std::get<List>(v_); }

  /// Type of a non-missing scalar; nullopt for missing and lists.
  std::optional<CellType> cell_type() const;

  const Storage& storage() const { return v_; }

  /// Exact structural equality (no numeric tolerance).
  bool operator==(const Value&) const = default;

 private:
  explicit Value(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

/// Shortest round-trip decimal for numbers, TRUE/FALSE for booleans,
/// ISO dates, Python-style list literals, empty string for missing.
std::string display(const Value& v);

/// Shortest round-trip decimal representation.
std::string format_number(double d);

/// Accepts optionally signed decimals with optional fraction and exponent.
std::optional<double> parse_number(std::string_view text);

/// Accepts M/D/YY (years 30..99 -> 19xx, 00..29 -> 20xx) and "Mon D YYYY".
std::optional<Date> parse_date(std::string_view text);

/// "Mon D YYYY", the form serialize_csv writes.
std::string format_date(Date d);

/// Value equality with absolute numeric tolerance; missing equals missing.
bool values_equivalent(const Value& a, const Value& b, double tolerance = 1e-9);

struct Column {
  std::string name;
  ElemType type;
  std::vector<Value> cells;

  bool operator==(const Column&) const = default;
};

/// Named, column-oriented relational table. Construction validates that there
/// is at least one column, names are unique, lengths agree and every
/// non-missing cell matches its column type.
class Table {
 public:
  Table(std::string name, std::vector<Column> columns);

  const std::string& name() const { return name_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t num_rows() const { return columns_.front().cells.size(); }
  std::size_t num_columns() const { return columns_.size(); }

  const Column* find(std::string_view column_name) const;
  std::vector<std::string> column_names() const;

  /// Returns a copy with `column` added, or replacing a same-named column.
  Table with_column(Column column) const;

  bool operator==(const Table&) const = default;

 private:
  std::string name_;
  std::vector<Column> columns_;
};

/// Infers the column type from raw CSV fields. Empty fields are ignored;
/// throws Error(UntypeableColumn) if every field is empty.
CellType infer_column_type(std::span<const std::string> cells);

/// Parses an RFC-4180-style CSV document (comma separator, header row).
Table parse_csv(std::string_view text, std::string table_name = "df");

/// Writes the dialect parse_csv reads.
std::string serialize_csv(const Table& table);

/// Result of a computation, classified by shape.
struct TabularOutput {
  enum class Shape { SingleValue, NewColumns, NewRows, NewTable };

  Shape shape = Shape::SingleValue;
  std::variant<Value, std::vector<Column>, Table> payload;

  static TabularOutput single(Value v);
  static TabularOutput new_columns(std::vector<Column> columns);
  static TabularOutput new_table(Table t);
};

std::string_view to_string(TabularOutput::Shape s);
std::optional<TabularOutput::Shape> shape_from_string(std::string_view s);

/// Same shape and positionally identical cells, ignoring column labels.
bool outputs_equivalent(const TabularOutput& a, const TabularOutput& b);

}  // namespace nl2grid
