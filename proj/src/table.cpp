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

#include "nl2grid/table.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <regex>
#include <unordered_set>

#include "nl2grid/error.hpp"

namespace nl2grid {

namespace {

constexpr std::array<std::string_view, 12> kMonthAbbrev = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::chrono::year_month_day to_ymd(Date d) {
  return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{d.days()}}};
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

unsigned to_unsigned(std::string_view s) {
  unsigned v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::optional<Date> make_date(int y, unsigned m, unsigned d) {
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

std::string quote_list_item(const Value& v) {
  if (v.is_text()) return "'" + v.as_text() + "'";
  return display(v);
}

}  // namespace

std::string_view to_string(CellType t) {
  switch (t) {
    case CellType::Number: return "Number";
    case CellType::Text: return "Text";
    case CellType::Bool: return "Bool";
    case CellType::Date: return "Date";
  }
  return "Text";
}

std::string to_string(ElemType t) {
  std::string base(to_string(t.cell));
  return t.list ? "ListOf(" + base + ")" : base;
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  auto d = make_date(year, month, day);
  if (!d) throw Error(ErrorCode::InvalidArgument, "invalid calendar date");
  return *d;
}

int Date::year() const { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(*this).day()); }

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

std::optional<CellType> Value::cell_type() const {
  switch (v_.index()) {
    case 1: return CellType::Number;
    case 2: return CellType::Text;
    case 3: return CellType::Bool;
    case 4: return CellType::Date;
    default: return std::nullopt;
  }
}

std::string format_number(double d) {
  if (d == 0.0) return "0";
  char buf[400];
  double mag = std::fabs(d);
  auto fmt = mag >= 1e-4 && mag < 1e16 ? std::chars_format::fixed : std::chars_format::scientific;
  auto res = std::to_chars(buf, buf + sizeof buf, d, fmt);
  return std::string(buf, res.ptr);
}

std::string display(const Value& v) {
  struct Visitor {
    std::string operator()(const Missing&) const { return ""; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(Date d) const { return d.iso(); }
    std::string operator()(const Value::List& l) const {
      std::string out = "[";
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) out += ", ";
        out += quote_list_item(l[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v.storage());
}

std::optional<double> parse_number(std::string_view text) {
  static const std::regex pattern(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  std::string s(text);
  if (!std::regex_match(s, pattern)) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double out = 0;
  auto res = std::from_chars(begin, s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

std::optional<Date> parse_date(std::string_view text) {
  // M/D/YY
  if (auto first = text.find('/'); first != std::string_view::npos) {
    auto second = text.find('/', first + 1);
    if (second == std::string_view::npos) return std::nullopt;
    auto m = text.substr(0, first);
    auto d = text.substr(first + 1, second - first - 1);
    auto y = text.substr(second + 1);
    if (m.size() > 2 || d.size() > 2 || y.size() != 2) return std::nullopt;
    if (!all_digits(m) || !all_digits(d) || !all_digits(y)) return std::nullopt;
    unsigned yy = to_unsigned(y);
    int year = yy >= 30 ? 1900 + static_cast<int>(yy) : 2000 + static_cast<int>(yy);
    return make_date(year, to_unsigned(m), to_unsigned(d));
  }
  // Mon D YYYY
  if (text.size() < 10 || text[3] != ' ') return std::nullopt;
  auto mon = text.substr(0, 3);
  auto it = std::find(kMonthAbbrev.begin(), kMonthAbbrev.end(), mon);
  if (it == kMonthAbbrev.end()) return std::nullopt;
  auto rest = text.substr(4);
  auto space = rest.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  auto d = rest.substr(0, space);
  auto y = rest.substr(space + 1);
  if (d.size() > 2 || y.size() != 4 || !all_digits(d) || !all_digits(y)) return std::nullopt;
  return make_date(static_cast<int>(to_unsigned(y)),
                   static_cast<unsigned>(it - kMonthAbbrev.begin()) + 1, to_unsigned(d));
}

std::string format_date(Date d) {
  return std::string(kMonthAbbrev[d.month() - 1]) + " " + std::to_string(d.day()) + " " +
         std::to_string(d.year());
}

bool values_equivalent(const Value& a, const Value& b, double tolerance) {
  if (a.is_number() && b.is_number()) {
    double x = a.as_number(), y = b.as_number();
    if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
    if (x == y) return true;
    return std::fabs(x - y) <= tolerance;
  }
  if (a.is_list() && b.is_list()) {
    const auto& l = a.as_list();
    const auto& r = b.as_list();
    if (l.size() != r.size()) return false;
    for (std::size_t i = 0; i < l.size(); ++i)
      if (!values_equivalent(l[i], r[i], tolerance)) return false;
    return true;
  }
  return a == b;
}

Table::Table(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  if (columns_.empty()) throw Error(ErrorCode::InvalidArgument, "a table needs at least one column");
  std::unordered_set<std::string> seen;
  const auto rows = columns_.front().cells.size();
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate column name '" + c.name + "'");
    if (c.cells.size() != rows)
      throw Error(ErrorCode::InvalidArgument, "column '" + c.name + "' has a different length");
    for (const auto& cell : c.cells) {
      if (cell.is_missing()) continue;
      bool ok = c.type.list ? cell.is_list() : cell.cell_type() == c.type.cell;
      if (ok && c.type.list) {
        for (const auto& item : cell.as_list())
          ok = ok && (item.is_missing() || item.cell_type() == c.type.cell);
      }
      if (!ok)
        throw Error(ErrorCode::InvalidArgument,
                    "cell in column '" + c.name + "' does not match type " + to_string(c.type));
    }
  }
}

const Column* Table::find(std::string_view column_name) const {
  for (const auto& c : columns_)
    if (c.name == column_name) return &c;
  return nullptr;
}

std::vector<std::string> Table::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

Table Table::with_column(Column column) const {
  auto cols = columns_;
  auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return c.name == column.name; });
  if (it != cols.end())
    *it = std::move(column);
  else
    cols.push_back(std::move(column));
  return Table(name_, std::move(cols));
}

CellType infer_column_type(std::span<const std::string> cells) {
  bool any = false, number = true, boolean = true, date = true;
  for (const auto& raw : cells) {
    if (raw.empty()) continue;
    any = true;
    if (number && !parse_number(raw)) number = false;
    if (boolean) {
      std::string lower(raw);
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
      if (lower != "true" && lower != "false") boolean = false;
    }
    if (date && !parse_date(raw)) date = false;
  }
  if (!any) throw Error(ErrorCode::UntypeableColumn, "every cell of the column is empty");
  if (number) return CellType::Number;
  if (boolean) return CellType::Bool;
  if (date) return CellType::Date;
  return CellType::Text;
}

namespace {

std::vector<std::vector<std::string>> split_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false, field_started = false, after_quote = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = after_quote = false;
  };
  auto end_record = [&] {
    bool blank = record.empty() && field.empty() && !field_started;
    end_field();
    // Blank lines are dropped; a quoted empty field is a row.
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || after_quote)
          throw Error(ErrorCode::CsvMalformed, "stray quote on line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (after_quote)
          throw Error(ErrorCode::CsvMalformed, "text after closing quote on line " + std::to_string(line));
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::CsvMalformed, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

Value convert_cell(const std::string& raw, CellType type) {
  if (raw.empty()) return Value::missing();
  switch (type) {
    case CellType::Number: return Value::number(*parse_number(raw));
    case CellType::Bool: return Value::boolean(raw.size() == 4);
    case CellType::Date: return Value::date(*parse_date(raw));
    case CellType::Text: break;
  }
  return Value::text(raw);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Value& v) {
  if (v.is_date()) return format_date(v.as_date());
  return display(v);
}

}  // namespace

Table parse_csv(std::string_view text, std::string table_name) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  auto records = split_csv_records(text);
  if (records.empty()) throw Error(ErrorCode::CsvMalformed, "missing header row");
  const auto& header = records.front();
  if (records.size() == 1) throw Error(ErrorCode::CsvEmptyBody, "CSV has a header but no data rows");

  std::unordered_set<std::string> seen;
  for (const auto& h : header)
    if (!seen.insert(h).second)
      throw Error(ErrorCode::CsvDuplicateHeader, "duplicate header name '" + h + "'");

  for (std::size_t r = 1; r < records.size(); ++r)
    if (records[r].size() != header.size())
      throw Error(ErrorCode::CsvRaggedRow, "row " + std::to_string(r) + " has " +
                                               std::to_string(records[r].size()) + " fields, expected " +
                                               std::to_string(header.size()));

  std::vector<Column> columns;
  columns.reserve(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::vector<std::string> raw;
    raw.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) raw.push_back(records[r][c]);
    CellType type;
    try {
      type = infer_column_type(raw);
    } catch (const Error&) {
      throw Error(ErrorCode::UntypeableColumn, "column '" + header[c] + "' has no non-empty cells");
    }
    Column col{header[c], ElemType{type, false}, {}};
    col.cells.reserve(raw.size());
    for (const auto& cell : raw) col.cells.push_back(convert_cell(cell, type));
    columns.push_back(std::move(col));
  }
  return Table(std::move(table_name), std::move(columns));
}

std::string serialize_csv(const Table& table) {
  std::string out;
  const auto& cols = table.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += csv_field(cols[c].name);
  }
  out += '\n';
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      std::string cell = csv_field(csv_cell(cols[c].cells[r]));
      out += cell.empty() && cols.size() == 1 ? "\"\"" : cell;
    }
    out += '\n';
  }
  return out;
}

TabularOutput TabularOutput::single(Value v) { return {Shape::SingleValue, std::move(v)}; }
TabularOutput TabularOutput::new_columns(std::vector<Column> columns) {
  return {Shape::NewColumns, std::move(columns)};
}
TabularOutput TabularOutput::new_table(Table t) { return {Shape::NewTable, std::move(t)}; }

std::string_view to_string(TabularOutput::Shape s) {
  switch (s) {
    case TabularOutput::Shape::SingleValue: return "SingleValue";
    case TabularOutput::Shape::NewColumns: return "NewColumns";
    case TabularOutput::Shape::NewRows: return "NewRows";
    case TabularOutput::Shape::NewTable: return "NewTable";
  }
  return "SingleValue";
}

std::optional<TabularOutput::Shape> shape_from_string(std::string_view s) {
  for (auto shape : {TabularOutput::Shape::SingleValue, TabularOutput::Shape::NewColumns,
                     TabularOutput::Shape::NewRows, TabularOutput::Shape::NewTable})
    if (to_string(shape) == s) return shape;
  return std::nullopt;
}

namespace {

bool columns_equivalent(const std::vector<Column>& a, const std::vector<Column>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c].cells.size() != b[c].cells.size()) return false;
    for (std::size_t r = 0; r < a[c].cells.size(); ++r)
      if (!values_equivalent(a[c].cells[r], b[c].cells[r])) return false;
  }
  return true;
}

const std::vector<Column>& columns_of(const TabularOutput& o) {
  if (const auto* t = std::get_if<Table>(&o.payload)) return t->columns();
  return std::get<std::vector<Column>>(o.payload);
}

}  // namespace

bool outputs_equivalent(const TabularOutput& a, const TabularOutput& b) {
  if (a.shape != b.shape) return false;
  if (a.payload.index() != b.payload.index()) return false;
  if (const auto* v = std::get_if<Value>(&a.payload)) return values_equivalent(*v, std::get<Value>(b.payload));
  return columns_equivalent(columns_of(a), columns_of(b));
}

}  // namespace nl2grid
