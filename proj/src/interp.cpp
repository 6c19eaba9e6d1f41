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

#include "nl2grid/interp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <variant>

#include "nl2grid/error.hpp"

namespace nl2grid::interp {

using tcr::Kind;

std::string_view to_string(Placement p) {
  return p == Placement::AppendToGrid ? "AppendToGrid" : "SidePaneOnly";
}

Placement classify_output(const TabularOutput& output) {
  switch (output.shape) {
    case TabularOutput::Shape::NewColumns:
    case TabularOutput::Shape::NewRows: return Placement::AppendToGrid;
    case TabularOutput::Shape::SingleValue:
    case TabularOutput::Shape::NewTable: return Placement::SidePaneOnly;
  }
  return Placement::SidePaneOnly;
}

namespace {

using Index = std::vector<std::size_t>;

struct SeriesV {
  Index index;
  std::vector<Value> cells;
  ElemType type;
  std::string name;
};

struct FrameV {
  Index index;
  std::vector<Column> columns;  // cells aligned with index
};

struct TupleV {
  std::vector<std::string> labels;
  std::vector<Value> values;
};

struct GroupedV {
  FrameV frame;
  std::vector<std::string> keys;
};

using Runtime = std::variant<FrameV, SeriesV, Value, TupleV, GroupedV>;

[[noreturn]] void fault(const std::string& what) { throw Error(ErrorCode::RuntimeFault, what); }
[[noreturn]] void unsupported(const std::string& what) { throw Error(ErrorCode::UnsupportedAtRuntime, what); }

const ElemType kNumber{CellType::Number, false};
const ElemType kText{CellType::Text, false};
const ElemType kBool{CellType::Bool, false};
const ElemType kDate{CellType::Date, false};

// ---- UTF-8 helpers

std::vector<std::string> code_points(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::optional<std::size_t> resolve_position(std::int64_t i, std::size_t size) {
  std::int64_t n = static_cast<std::int64_t>(size);
  if (i < 0) i += n;
  if (i < 0 || i >= n) return std::nullopt;
  return static_cast<std::size_t>(i);
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// ---- scalar semantics

double as_arith(const Value& v) { return v.is_bool() ? (v.as_bool() ? 1.0 : 0.0) : v.as_number(); }

Value arith(Kind k, const Value& a, const Value& b) {
  if (a.is_missing() || b.is_missing()) return Value::missing();
  if (k == Kind::Add && a.is_text() && b.is_text()) return Value::text(a.as_text() + b.as_text());
  double x = as_arith(a), y = as_arith(b);
  switch (k) {
    case Kind::Add: return Value::number(x + y);
    case Kind::Sub: return Value::number(x - y);
    case Kind::Mul: return Value::number(x * y);
    case Kind::Div:
      if (y == 0) return Value::missing();
      return Value::number(x / y);
    default: fault("not an arithmetic operator");
  }
}

int order(const Value& a, const Value& b) {
  if (a.is_number() || a.is_bool()) {
    double x = as_arith(a), y = as_arith(b);
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (a.is_text()) return a.as_text().compare(b.as_text()) < 0 ? -1 : a.as_text() == b.as_text() ? 0 : 1;
  if (a.is_date()) return a.as_date() < b.as_date() ? -1 : a.as_date() == b.as_date() ? 0 : 1;
  fault("values cannot be ordered");
}

Value compare(Kind k, const Value& a, const Value& b) {
  if (a.is_missing() || b.is_missing()) return Value::boolean(k == Kind::NotEq);
  int c = order(a, b);
  switch (k) {
    case Kind::Eq: return Value::boolean(c == 0);
    case Kind::NotEq: return Value::boolean(c != 0);
    case Kind::Gt: return Value::boolean(c > 0);
    case Kind::Ge: return Value::boolean(c >= 0);
    case Kind::Lt: return Value::boolean(c < 0);
    case Kind::Le: return Value::boolean(c <= 0);
    default: fault("not a comparison");
  }
}

bool truthy(const Value& v) { return v.is_bool() && v.as_bool(); }

bool has_regex_meta(const std::string& p) { return p.find_first_of("\\^$.|?*+()[]{}") != std::string::npos; }

std::string replace_literal(const std::string& s, const std::string& from, const std::string& to) {
  if (from.empty()) {
    // Python inserts the replacement between every character.
    std::string out = to;
    for (const auto& cp : code_points(s)) out += cp + to;
    return out;
  }
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t at = s.find(from, pos);
    if (at == std::string::npos) break;
    out += s.substr(pos, at - pos) + to;
    pos = at + from.size();
  }
  return out + s.substr(pos);
}

std::size_t count_literal(const std::string& s, const std::string& p) {
  if (p.empty()) return code_points(s).size() + 1;
  std::size_t n = 0;
  for (std::size_t at = s.find(p); at != std::string::npos; at = s.find(p, at + p.size())) ++n;
  return n;
}

Value split_text(const std::string& s, const std::optional<std::string>& delim) {
  Value::List parts;
  if (!delim) {
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && is_space(s[i])) ++i;
      std::size_t start = i;
      while (i < s.size() && !is_space(s[i])) ++i;
      if (i > start) parts.push_back(Value::text(s.substr(start, i - start)));
    }
  } else {
    if (delim->empty()) fault("empty separator");
    std::size_t pos = 0;
    for (;;) {
      std::size_t at = s.find(*delim, pos);
      if (at == std::string::npos) break;
      parts.push_back(Value::text(s.substr(pos, at - pos)));
      pos = at + delim->size();
    }
    parts.push_back(Value::text(s.substr(pos)));
  }
  return Value::list(std::move(parts));
}

std::int32_t floor_div(std::int32_t a, std::int32_t b) {
  std::int32_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// ---- evaluator

class Evaluator {
 public:
  Evaluator(const Table& table, std::vector<std::string> protected_columns)
      : working_(table), protected_(protected_columns.begin(), protected_columns.end()) {}

  EvalOutput run(const tcr::Program& program) {
    std::optional<Runtime> result;
    for (const auto& s : program.statements) {
      switch (s.kind) {
        case tcr::Statement::Kind::CreateColumn: create(s.name, eval(s.expr)); break;
        case tcr::Statement::Kind::BindVar: env_.insert_or_assign(s.name, eval(s.expr)); break;
        case tcr::Statement::Kind::Yield: result = eval(s.expr); break;
      }
    }
    EvalOutput out;
    out.created_column_names = created_;
    if (result) {
      out.output = shape(*result);
    } else {
      if (created_.empty()) throw Error(ErrorCode::UndisplayableOutput, "the program produces no result");
      std::vector<Column> cols;
      for (const auto& name : created_) cols.push_back(*working_.find(name));
      out.output = TabularOutput::new_columns(std::move(cols));
    }
    out.placement = classify_output(out.output);
    // Yielded series get their grid name only when they are appended.
    if (result && out.output.shape == TabularOutput::Shape::NewColumns && created_.empty())
      out.created_column_names = {std::get<std::vector<Column>>(out.output.payload).front().name};
    return out;
  }

 private:
  Index full_index() const {
    Index idx(working_.num_rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }

  FrameV frame_of_table() const { return {full_index(), working_.columns()}; }

  static Table to_table(const FrameV& f) {
    if (f.columns.empty()) return Table("result", {Column{"index", kText, {}}});
    return Table("result", f.columns);
  }

  std::string unique_name(std::string base) const {
    if (base.empty()) base = "result";
    if (!working_.find(base)) return base;
    for (int i = 1;; ++i) {
      std::string candidate = base + " (" + std::to_string(i) + ")";
      if (!working_.find(candidate)) return candidate;
    }
  }

  TabularOutput shape(const Runtime& r) const {
    if (auto* v = std::get_if<Value>(&r)) return TabularOutput::single(*v);
    if (auto* t = std::get_if<TupleV>(&r)) return TabularOutput::single(Value::list(t->values));
    if (auto* s = std::get_if<SeriesV>(&r)) {
      Column c{unique_name(s->name), s->type, s->cells};
      if (s->index == full_index()) return TabularOutput::new_columns({std::move(c)});
      c.name = s->name.empty() ? "result" : s->name;
      return TabularOutput::new_table(Table("result", {std::move(c)}));
    }
    if (auto* f = std::get_if<FrameV>(&r)) return TabularOutput::new_table(to_table(*f));
    throw Error(ErrorCode::UndisplayableOutput, "a grouping must be aggregated");
  }

  void create(const std::string& name, const Runtime& value) {
    if (protected_.count(name)) throw Error(ErrorCode::OverwriteRefused, "cannot overwrite original column '" + name + "'");
    Column col{name, kNumber, std::vector<Value>(working_.num_rows())};
    if (auto* s = std::get_if<SeriesV>(&value)) {
      col.type = s->type;
      for (std::size_t i = 0; i < s->index.size(); ++i)
        if (s->index[i] < col.cells.size()) col.cells[s->index[i]] = s->cells[i];
    } else if (auto* v = std::get_if<Value>(&value)) {
      auto t = v->cell_type();
      if (!t) fault("a new column needs a typed value");
      col.type = {*t, false};
      std::fill(col.cells.begin(), col.cells.end(), *v);
    } else {
      fault("a new column needs a column or a value");
    }
    working_ = working_.with_column(std::move(col));
    if (std::find(created_.begin(), created_.end(), name) == created_.end()) created_.push_back(name);
  }

  Runtime eval(const tcr::Expr& e) {
    switch (e.kind) {
      case Kind::FrameRef: return frame_of_table();
      case Kind::VarRef: {
        auto it = env_.find(e.name);
        if (it == env_.end()) unsupported("unbound name '" + e.name + "'");
        return it->second;
      }
      case Kind::ColProject: {
        FrameV f = frame(eval(e.subject()));
        for (auto& c : f.columns)
          if (c.name == e.name) return SeriesV{f.index, std::move(c.cells), c.type, c.name};
        fault("no column '" + e.name + "'");
      }
      case Kind::RowFilter: return row_filter(eval(e.args[0]), series(eval(e.args[1])));
      case Kind::Eq:
      case Kind::NotEq:
      case Kind::Gt:
      case Kind::Ge:
      case Kind::Lt:
      case Kind::Le:
        return zip(eval(e.args[0]), eval(e.args[1]), kBool, [&](const Value& a, const Value& b) {
          return compare(e.kind, a, b);
        });
      case Kind::Add:
      case Kind::Sub:
      case Kind::Mul:
      case Kind::Div: {
        ElemType t = e.type.elem;
        return zip(eval(e.args[0]), eval(e.args[1]), t, [&](const Value& a, const Value& b) {
          return arith(e.kind, a, b);
        });
      }
      case Kind::And:
      case Kind::Or: {
        Runtime acc = eval(e.args[0]);
        bool is_and = e.kind == Kind::And;
        for (std::size_t i = 1; i < e.args.size(); ++i)
          acc = zip(acc, eval(e.args[i]), kBool, [&](const Value& a, const Value& b) {
            return Value::boolean(is_and ? truthy(a) && truthy(b) : truthy(a) || truthy(b));
          });
        return acc;
      }
      case Kind::Not: return map(eval(e.subject()), kBool, [](const Value& v) { return Value::boolean(!truthy(v)); });
      case Kind::Literal: return e.literal;
      case Kind::LiteralList: {
        auto n = working_.num_rows();
        if (e.values.size() != n)
          fault("length of values (" + std::to_string(e.values.size()) + ") does not match length of index (" +
                std::to_string(n) + ")");
        return SeriesV{full_index(), e.values, e.type.elem, ""};
      }
      case Kind::Split: {
        std::optional<std::string> d;
        if (e.has_pattern) d = e.pattern;
        return map_present(eval(e.subject()), {CellType::Text, true},
                           [&](const Value& v) { return split_text(v.as_text(), d); });
      }
      case Kind::Replace: return replace(eval(e.subject()), e.pattern, e.replacement);
      case Kind::Lower:
        return map_present(eval(e.subject()), kText, [](const Value& v) {
          std::string s = v.as_text();
          for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          return Value::text(std::move(s));
        });
      case Kind::Strip:
        return map_present(eval(e.subject()), kText, [](const Value& v) {
          const std::string& s = v.as_text();
          std::size_t b = 0, en = s.size();
          while (b < en && is_space(s[b])) ++b;
          while (en > b && is_space(s[en - 1])) --en;
          return Value::text(s.substr(b, en - b));
        });
      case Kind::CountOccurrences:
        return map_present(eval(e.subject()), kNumber, [&](const Value& v) {
          return Value::number(static_cast<double>(count_literal(v.as_text(), e.pattern)));
        });
      case Kind::Contains:
        return map(eval(e.subject()), kBool, [&](const Value& v) {
          if (v.is_missing()) return Value::boolean(false);
          return Value::boolean(v.as_text().find(e.pattern) != std::string::npos);
        });
      case Kind::Len:
        return map_present(eval(e.subject()), kNumber, [](const Value& v) {
          std::size_t n = v.is_list() ? v.as_list().size() : code_points(v.as_text()).size();
          return Value::number(static_cast<double>(n));
        });
      case Kind::ElemIndex: return elem_index(e);
      case Kind::SliceRows: return slice(eval(e.subject()), e.lo, e.hi);
      case Kind::Sum:
      case Kind::Min:
      case Kind::Max:
      case Kind::Mean:
      case Kind::Count:
      case Kind::IdxMax: return aggregate(e.kind, eval(e.subject()));
      case Kind::RowCount: return Value::number(static_cast<double>(frame(eval(e.subject())).index.size()));
      case Kind::Shape: {
        FrameV f = frame(eval(e.subject()));
        return TupleV{{"rows", "columns"},
                      {Value::number(static_cast<double>(f.index.size())),
                       Value::number(static_cast<double>(f.columns.size()))}};
      }
      case Kind::GroupBy: return GroupedV{frame(eval(e.subject())), e.keys};
      case Kind::GroupSize: return group_size(std::get<GroupedV>(eval(e.subject())));
      case Kind::Transpose: return transpose(frame(eval(e.subject())));
      case Kind::DateYear:
        return map_present(eval(e.subject()), kNumber,
                           [](const Value& v) { return Value::number(v.as_date().year()); });
      case Kind::DateCeil: {
        std::string digits = e.name.substr(0, e.name.size() - 1);
        std::int32_t n = digits.empty() ? 1 : std::stoi(digits);
        if (n <= 0 || e.name.back() != 'D') unsupported("ceil unit '" + e.name + "'");
        return map_present(eval(e.subject()), kDate, [n](const Value& v) {
          std::int32_t d = v.as_date().days();
          std::int32_t q = floor_div(d, n);
          if (q * n != d) ++q;
          return Value::date(Date(q * n));
        });
      }
    }
    unsupported(std::string(tcr::to_string(e.kind)));
  }

  static FrameV frame(Runtime r) {
    if (auto* f = std::get_if<FrameV>(&r)) return std::move(*f);
    fault("expected a table");
  }

  static SeriesV series(Runtime r) {
    if (auto* s = std::get_if<SeriesV>(&r)) return std::move(*s);
    fault("expected a column");
  }

  template <typename F>
  static Runtime map(Runtime r, ElemType type, F f) {
    if (auto* v = std::get_if<Value>(&r)) return f(*v);
    SeriesV s = series(std::move(r));
    for (auto& c : s.cells) c = f(c);
    s.type = type;
    return s;
  }

  // Missing stays missing.
  template <typename F>
  static Runtime map_present(Runtime r, ElemType type, F f) {
    return map(std::move(r), type, [&](const Value& v) { return v.is_missing() ? v : f(v); });
  }

  template <typename F>
  static Runtime zip(const Runtime& a, const Runtime& b, ElemType type, F f) {
    const auto* sa = std::get_if<SeriesV>(&a);
    const auto* sb = std::get_if<SeriesV>(&b);
    if (!sa && !sb) return f(std::get<Value>(a), std::get<Value>(b));
    if (sa && !sb) {
      const Value& rhs = std::get<Value>(b);
      SeriesV out{sa->index, {}, type, sa->name};
      for (const auto& c : sa->cells) out.cells.push_back(f(c, rhs));
      return out;
    }
    if (!sa && sb) {
      const Value& lhs = std::get<Value>(a);
      SeriesV out{sb->index, {}, type, sb->name};
      for (const auto& c : sb->cells) out.cells.push_back(f(lhs, c));
      return out;
    }
    std::string name = sa->name == sb->name ? sa->name : "";
    if (sa->index == sb->index) {
      SeriesV out{sa->index, {}, type, name};
      for (std::size_t i = 0; i < sa->cells.size(); ++i) out.cells.push_back(f(sa->cells[i], sb->cells[i]));
      return out;
    }
    // Align on the union of row labels, as dataframe libraries do.
    std::map<std::size_t, Value> left, right;
    for (std::size_t i = 0; i < sa->index.size(); ++i) left.emplace(sa->index[i], sa->cells[i]);
    for (std::size_t i = 0; i < sb->index.size(); ++i) right.emplace(sb->index[i], sb->cells[i]);
    std::set<std::size_t> labels;
    for (auto& [k, v] : left) labels.insert(k);
    for (auto& [k, v] : right) labels.insert(k);
    SeriesV out{{}, {}, type, name};
    for (std::size_t k : labels) {
      auto l = left.find(k);
      auto r = right.find(k);
      Value lv = l == left.end() ? Value::missing() : l->second;
      Value rv = r == right.end() ? Value::missing() : r->second;
      out.index.push_back(k);
      out.cells.push_back(f(lv, rv));
    }
    return out;
  }

  static Runtime row_filter(Runtime subject, const SeriesV& mask) {
    std::map<std::size_t, bool> keep;
    for (std::size_t i = 0; i < mask.index.size(); ++i) keep[mask.index[i]] = truthy(mask.cells[i]);
    auto selected = [&](std::size_t label) {
      auto it = keep.find(label);
      return it != keep.end() && it->second;
    };
    if (auto* s = std::get_if<SeriesV>(&subject)) {
      SeriesV out{{}, {}, s->type, s->name};
      for (std::size_t i = 0; i < s->index.size(); ++i)
        if (selected(s->index[i])) {
          out.index.push_back(s->index[i]);
          out.cells.push_back(s->cells[i]);
        }
      return out;
    }
    FrameV f = frame(std::move(subject));
    FrameV out{{}, {}};
    for (const auto& c : f.columns) out.columns.push_back({c.name, c.type, {}});
    for (std::size_t i = 0; i < f.index.size(); ++i) {
      if (!selected(f.index[i])) continue;
      out.index.push_back(f.index[i]);
      for (std::size_t c = 0; c < f.columns.size(); ++c) out.columns[c].cells.push_back(f.columns[c].cells[i]);
    }
    return out;
  }

  static Runtime replace(Runtime subject, const std::string& pattern, const std::string& replacement) {
    if (!has_regex_meta(pattern)) {
      return map_present(std::move(subject), kText,
                         [&](const Value& v) { return Value::text(replace_literal(v.as_text(), pattern, replacement)); });
    }
    std::regex re;
    try {
      re = std::regex(pattern, std::regex::ECMAScript);
    } catch (const std::regex_error&) {
      fault("invalid pattern '" + pattern + "'");
    }
    // Python group references (\1) become ECMAScript ones ($1).
    std::string fmt;
    for (std::size_t i = 0; i < replacement.size(); ++i) {
      if (replacement[i] == '\\' && i + 1 < replacement.size() && std::isdigit(static_cast<unsigned char>(replacement[i + 1]))) {
        fmt += '$';
        continue;
      }
      if (replacement[i] == '$') fmt += '$';
      fmt += replacement[i];
    }
    return map_present(std::move(subject), kText,
                       [&](const Value& v) { return Value::text(std::regex_replace(v.as_text(), re, fmt)); });
  }

  Runtime elem_index(const tcr::Expr& e) {
    Runtime subject = eval(e.subject());
    switch (e.index_kind) {
      case tcr::IndexKind::CharOfText:
        return map_present(std::move(subject), kText, [&](const Value& v) {
          auto cps = code_points(v.as_text());
          auto at = resolve_position(e.index, cps.size());
          return at ? Value::text(cps[*at]) : Value::missing();
        });
      case tcr::IndexKind::WordOfList:
        return map_present(std::move(subject), e.type.elem, [&](const Value& v) {
          const auto& items = v.as_list();
          auto at = resolve_position(e.index, items.size());
          return at ? items[*at] : Value::missing();
        });
      case tcr::IndexKind::ElementOfSeries: {
        SeriesV s = series(std::move(subject));
        auto at = resolve_position(e.index, s.cells.size());
        if (!at) fault("position " + std::to_string(e.index) + " is out of bounds");
        return s.cells[*at];
      }
      case tcr::IndexKind::TupleField: {
        const auto& t = std::get<TupleV>(subject);
        return t.values.at(static_cast<std::size_t>(e.index));
      }
    }
    unsupported("element access");
  }

  static Runtime slice(Runtime subject, std::optional<std::int64_t> lo, std::optional<std::int64_t> hi) {
    auto bounds = [&](std::size_t n) {
      std::size_t b = lo ? std::min<std::size_t>(static_cast<std::size_t>(*lo), n) : 0;
      std::size_t e = hi ? std::min<std::size_t>(static_cast<std::size_t>(*hi), n) : n;
      return std::pair{b, std::max(b, e)};
    };
    if (auto* s = std::get_if<SeriesV>(&subject)) {
      auto [b, e] = bounds(s->cells.size());
      return SeriesV{Index(s->index.begin() + b, s->index.begin() + e),
                     std::vector<Value>(s->cells.begin() + b, s->cells.begin() + e), s->type, s->name};
    }
    FrameV f = frame(std::move(subject));
    auto [b, e] = bounds(f.index.size());
    FrameV out{Index(f.index.begin() + b, f.index.begin() + e), {}};
    for (auto& c : f.columns)
      out.columns.push_back({c.name, c.type, std::vector<Value>(c.cells.begin() + b, c.cells.begin() + e)});
    return out;
  }

  static Value aggregate_cells(Kind k, const std::vector<Value>& cells, const Index& index) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (!cells[i].is_missing()) present.push_back(i);
    switch (k) {
      case Kind::Count: return Value::number(static_cast<double>(present.size()));
      case Kind::Sum: {
        double total = 0;
        for (auto i : present) total += as_arith(cells[i]);
        return Value::number(total);
      }
      case Kind::Mean: {
        if (present.empty()) return Value::missing();
        double total = 0;
        for (auto i : present) total += as_arith(cells[i]);
        return Value::number(total / static_cast<double>(present.size()));
      }
      case Kind::Min:
      case Kind::Max:
      case Kind::IdxMax: {
        if (present.empty()) return Value::missing();
        std::size_t best = present.front();
        for (auto i : present) {
          int c = order(cells[i], cells[best]);
          if (k == Kind::Min ? c < 0 : c > 0) best = i;
        }
        if (k == Kind::IdxMax) return Value::number(static_cast<double>(index[best]));
        return cells[best];
      }
      default: fault("not an aggregate");
    }
  }

  static Runtime aggregate(Kind k, Runtime subject) {
    if (auto* s = std::get_if<SeriesV>(&subject)) return aggregate_cells(k, s->cells, s->index);
    FrameV f = frame(std::move(subject));
    Column names{"index", kText, {}};
    std::string label{tcr::to_string(k)};
    for (auto& ch : label) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    Column values{label, kNumber, {}};
    for (const auto& c : f.columns) {
      bool numeric = !c.type.list && (c.type.cell == CellType::Number || c.type.cell == CellType::Bool);
      if (k != Kind::Count && !numeric) continue;
      names.cells.push_back(Value::text(c.name));
      Value v = aggregate_cells(k, c.cells, f.index);
      if (c.type.cell == CellType::Bool && (k == Kind::Min || k == Kind::Max) && v.is_bool())
        v = Value::number(as_arith(v));
      values.cells.push_back(v);
    }
    Index idx(names.cells.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return FrameV{idx, {std::move(names), std::move(values)}};
  }

  static Runtime group_size(const GroupedV& g) {
    std::vector<const Column*> keys;
    for (const auto& k : g.keys) {
      auto it = std::find_if(g.frame.columns.begin(), g.frame.columns.end(),
                             [&](const Column& c) { return c.name == k; });
      if (it == g.frame.columns.end()) fault("no column '" + k + "'");
      keys.push_back(&*it);
    }
    auto less = [](const std::vector<Value>& a, const std::vector<Value>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        int c = order(a[i], b[i]);
        if (c != 0) return c < 0;
      }
      return false;
    };
    std::map<std::vector<Value>, std::size_t, decltype(less)> counts(less);
    for (std::size_t row = 0; row < g.frame.index.size(); ++row) {
      std::vector<Value> key;
      bool missing = false;
      for (const auto* c : keys) {
        missing = missing || c->cells[row].is_missing();
        key.push_back(c->cells[row]);
      }
      if (!missing) ++counts[key];
    }
    FrameV out{{}, {}};
    for (const auto* c : keys) out.columns.push_back({c->name, c->type, {}});
    out.columns.push_back({"size", kNumber, {}});
    std::size_t i = 0;
    for (const auto& [key, n] : counts) {
      for (std::size_t k = 0; k < key.size(); ++k) out.columns[k].cells.push_back(key[k]);
      out.columns.back().cells.push_back(Value::number(static_cast<double>(n)));
      out.index.push_back(i++);
    }
    return out;
  }

  static Runtime transpose(const FrameV& f) {
    std::optional<ElemType> common;
    bool mixed = false;
    for (const auto& c : f.columns) {
      if (common && !(*common == c.type)) mixed = true;
      common = c.type;
    }
    ElemType type = mixed || !common ? kText : *common;
    FrameV out{{}, {}};
    Column names{"index", kText, {}};
    for (const auto& c : f.columns) names.cells.push_back(Value::text(c.name));
    out.columns.push_back(std::move(names));
    for (std::size_t row = 0; row < f.index.size(); ++row) {
      Column col{std::to_string(f.index[row]), type, {}};
      for (const auto& c : f.columns) {
        const Value& v = c.cells[row];
        col.cells.push_back(mixed && !v.is_missing() ? Value::text(display(v)) : v);
      }
      out.columns.push_back(std::move(col));
    }
    for (std::size_t i = 0; i < f.columns.size(); ++i) out.index.push_back(i);
    return out;
  }

  Table working_;
  std::set<std::string> protected_;
  std::map<std::string, Runtime> env_;
  std::vector<std::string> created_;
};

}  // namespace

EvalOutput evaluate(const tcr::Program& program, const Table& table,
                    const std::optional<std::vector<std::string>>& protected_columns) {
  Evaluator ev(table, protected_columns ? *protected_columns : table.column_names());
  return ev.run(program);
}

Table apply_output(const Table& table, const EvalOutput& out) {
  if (out.placement != Placement::AppendToGrid) return table;
  Table result = table;
  if (const auto* cols = std::get_if<std::vector<Column>>(&out.output.payload))
    for (const auto& c : *cols) result = result.with_column(c);
  return result;
}

}  // namespace nl2grid::interp
