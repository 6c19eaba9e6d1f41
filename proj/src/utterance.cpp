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

#include "nl2grid/utterance.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

#include "nl2grid/error.hpp"

namespace nl2grid::utterance {

using tcr::Kind;

// ---------------------------------------------------------------------------
// Templates

const std::vector<Template>& template_table() {
  static const std::vector<Template> table = {
      {"FrameRef", Kind::FrameRef, "", "the table", 8},
      {"ColProject", Kind::ColProject, "select column {c}", "column {c}", 8},
      {"ColProject.of", Kind::ColProject, "select column {c}", "column {c} from {0}", 7},
      {"RowFilter", Kind::RowFilter, "select rows where {m}", "rows where {m}", 0},
      {"RowFilter.of", Kind::RowFilter, "select rows where {m}", "rows of {0} where {m}", 0},
      {"Eq", Kind::Eq, "", "{0} is {1}", 4, 5, 5},
      {"NotEq", Kind::NotEq, "", "{0} NotEq {1}", 4, 5, 5},
      {"Ge", Kind::Ge, "", "{0} greater than or equal to {1}", 4, 5, 5},
      {"Gt", Kind::Gt, "", "{0} greater than {1}", 4, 5, 5},
      {"Le", Kind::Le, "", "{0} less than or equal to {1}", 4, 5, 5},
      {"Lt", Kind::Lt, "", "{0} less than {1}", 4, 5, 5},
      {"Or", Kind::Or, "", "{0} or {1}", 1, 2, 2},
      {"And", Kind::And, "", "{0} and {1}", 2, 3, 3},
      {"Not", Kind::Not, "", "not {0}", 3, 3, 3},
      {"Add", Kind::Add, "", "{0} + {1}", 5, 5, 6},
      {"Sub", Kind::Sub, "", "{0} - {1}", 5, 5, 6},
      {"Mul", Kind::Mul, "", "{0} multiplied by {1}", 6, 6, 7},
      {"Div", Kind::Div, "", "{0} divided by {1}", 6, 6, 7},
      {"Literal", Kind::Literal, "", "{v}", 8},
      {"Split.ws", Kind::Split, "split the text on whitespace", "the text split on whitespace from {0}", 7},
      {"Split", Kind::Split, "split the text on {d}", "the text split on {d} from {0}", 7},
      {"Replace", Kind::Replace, "replace {a} with {b}", "the text with {a} replaced by {b} from {0}", 7},
      {"Lower", Kind::Lower, "convert to lowercase", "lowercase text from {0}", 7},
      {"Strip", Kind::Strip, "strip whitespace", "stripped text from {0}", 7},
      {"CountOccurrences", Kind::CountOccurrences, "calculate count {p}", "count {p} from {0}", 7},
      {"Contains", Kind::Contains, "check contains {p}", "contains {p} from {0}", 7},
      {"Len", Kind::Len, "len", "len from {0}", 7},
      {"ElemIndex.char", Kind::ElemIndex, "select character {k}", "character {k} of {0}", 7},
      {"ElemIndex.word", Kind::ElemIndex, "select word {k}", "word {k} of {0}", 7},
      {"ElemIndex.element", Kind::ElemIndex, "select element {k}", "element {k} of {0}", 7},
      {"SliceRows.range", Kind::SliceRows, "select rows {lo} to {hi}", "rows {lo} to {hi} of {0}", 7},
      {"SliceRows.from", Kind::SliceRows, "select rows {lo} onward", "rows {lo} onward of {0}", 7},
      {"SliceRows.head", Kind::SliceRows, "select the first {hi} rows", "the first {hi} rows of {0}", 7},
      {"Sum", Kind::Sum, "calculate sum", "the sum of {0}", 7},
      {"Min", Kind::Min, "calculate minimum", "the minimum of {0}", 7},
      {"Max", Kind::Max, "calculate maximum", "the maximum of {0}", 7},
      {"Mean", Kind::Mean, "calculate average", "the average of {0}", 7},
      {"Count", Kind::Count, "count", "the count of {0}", 7},
      {"RowCount", Kind::RowCount, "return number of rows", "the number of rows of {0}", 7},
      {"IdxMax", Kind::IdxMax, "find the position of the maximum", "the position of the maximum of {0}", 7},
      {"Shape", Kind::Shape, "calculate the dimensions", "the dimensions of {0}", 7},
      {"GroupBy", Kind::GroupBy, "group by {keys}", "groups by {keys} of {0}", 7},
      {"GroupSize", Kind::GroupSize, "calculate the size of each group", "the size of each group of {0}", 7},
      {"Transpose", Kind::Transpose, "transpose the table", "the transpose of {0}", 7},
      {"DateYear", Kind::DateYear, "calculate year", "the year of {0}", 7},
      {"DateCeil", Kind::DateCeil, "round the date up to {u}", "the date rounded up to {u} of {0}", 7},
      {"ElemIndex.field", Kind::ElemIndex, "select the {label}", "the {label} of {0}", 7},
      // Accepted when parsing, never produced.
      {"Mean.mean", Kind::Mean, "calculate mean", "the mean of {0}", 7, 7, 7, true},
      {"Mean.the", Kind::Mean, "calculate the average", "", 7, 7, 7, true},
      {"RowCount.the", Kind::RowCount, "return the number of rows", "", 7, 7, 7, true},
      {"ElemIndex.char.ord", Kind::ElemIndex, "select the {k} character", "the {k} character of {0}", 7, 7, 7, true},
      {"ElemIndex.word.ord", Kind::ElemIndex, "select the {k} word", "the {k} word of {0}", 7, 7, 7, true},
      {"ElemIndex.element.ord", Kind::ElemIndex, "select the {k} element", "the {k} element of {0}", 7, 7, 7,
       true},
  };
  return table;
}

const Template& find_template(std::string_view id) {
  for (const auto& t : template_table())
    if (t.id == id) return t;
  throw Error(ErrorCode::InvalidArgument, "no template '" + std::string(id) + "'");
}

namespace {

constexpr std::array<std::string_view, 6> kQuoteGlyphs = {"'", "\"", "\xE2\x80\x98", "\xE2\x80\x99",
                                                          "\xE2\x80\x9C", "\xE2\x80\x9D"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool iequals_at(std::string_view text, std::size_t pos, std::string_view lit) {
  if (pos + lit.size() > text.size()) return false;
  for (std::size_t i = 0; i < lit.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != std::tolower(static_cast<unsigned char>(lit[i])))
      return false;
  return true;
}

std::size_t ifind(std::string_view text, std::string_view lit, std::size_t from) {
  for (std::size_t i = from; i + lit.size() <= text.size(); ++i)
    if (iequals_at(text, i, lit)) return i;
  return std::string_view::npos;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool has_quote_glyph(std::string_view s) {
  return std::any_of(kQuoteGlyphs.begin(), kQuoteGlyphs.end(),
                     [&](std::string_view g) { return s.find(g) != std::string_view::npos; });
}

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorCode::ExplanationUnavailable, "no explanation available: " + what);
}

std::string quote_value(const std::string& v) {
  if (v.find('\'') == std::string::npos) return "'" + v + "'";
  if (v.find('"') == std::string::npos) return "\"" + v + "\"";
  unavailable("text containing both quote characters");
}

bool plain_spacing(std::string_view s) {
  if (s.empty() || std::isspace(static_cast<unsigned char>(s.front())) ||
      std::isspace(static_cast<unsigned char>(s.back())))
    return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != ' ' && std::isspace(static_cast<unsigned char>(s[i]))) return false;
    if (s[i] == ' ' && i + 1 < s.size() && s[i + 1] == ' ') return false;
  }
  return true;
}

bool has_step_marker(std::string_view s) {
  static const std::regex marker(R"(\(\d+\))");
  return std::regex_search(s.begin(), s.end(), marker);
}

std::string column_text(const std::string& name) {
  bool bare = plain_spacing(name) && !has_quote_glyph(name) && name.back() != '.' && name.back() != ',' &&
              lower(name).find(" from ") == std::string::npos && !has_step_marker(name);
  return bare ? name : quote_value(name);
}

// First words of every inline phrase; bare text starting with one would be
// read back as structure.
const std::vector<std::string>& phrase_heads() {
  static const std::vector<std::string> heads = [] {
    std::vector<std::string> out = {"column", "the", "not", "true", "false", "rows", "groups"};
    for (const auto& t : template_table()) {
      const std::string& f = t.inline_form;
      if (f.empty() || f.front() == '{') continue;
      out.push_back(lower(f.substr(0, f.find(' '))));
    }
    return out;
  }();
  return heads;
}

bool bare_text_safe(const std::string& v) {
  if (!plain_spacing(v) || has_quote_glyph(v) || has_step_marker(v)) return false;
  if (v.find_first_of("(),") != std::string::npos || v.back() == '.') return false;
  unsigned char first = static_cast<unsigned char>(v.front());
  if (std::isdigit(first) || first == '-' || first == '+' || first == '.') return false;
  std::string l = lower(v);
  std::string padded = " " + l + " ";
  if (padded.find(" and ") != std::string::npos || padded.find(" or ") != std::string::npos) return false;
  std::string head = l.substr(0, l.find(' '));
  const auto& heads = phrase_heads();
  return std::find(heads.begin(), heads.end(), head) == heads.end();
}

std::string index_text(std::int64_t i) {
  if (i < 0) return std::to_string(-i) + " from the end";
  return std::to_string(adjust_index_outbound(i));
}

std::string literal_text(const Value& v, bool bare_ok) {
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  std::string s;
  if (v.is_text()) s = v.as_text();
  else if (v.is_date()) s = v.as_date().iso();
  else unavailable("missing or list literal");
  return bare_ok && bare_text_safe(s) ? s : quote_value(s);
}

std::string_view kind_id(Kind k) { return tcr::to_string(k); }

}  // namespace

// ---------------------------------------------------------------------------
// ER tree

namespace {

ErNode build(const tcr::Expr& e, bool bare_text);

ErNode single(std::string id, const tcr::Expr& e) {
  ErNode n;
  n.template_id = std::move(id);
  n.children.push_back(build(e.subject(), false));
  n.subject_arity = 1;
  n.chainable = !find_template(n.template_id).chain.empty();
  n.style = ErNode::Style::Instructional;
  return n;
}

ErNode build(const tcr::Expr& e, bool bare_text) {
  ErNode n;
  switch (e.kind) {
    case Kind::FrameRef:
      n.template_id = "FrameRef";
      return n;
    case Kind::VarRef: unavailable("unresolved variable '" + e.name + "'");
    case Kind::LiteralList: unavailable("raw list of values");
    case Kind::Literal:
      n.template_id = "Literal";
      n.slots["v"] = literal_text(e.literal, bare_text);
      return n;
    case Kind::ColProject:
      n = single(e.subject().kind == Kind::FrameRef ? "ColProject" : "ColProject.of", e);
      n.slots["c"] = column_text(e.name);
      return n;
    case Kind::RowFilter:
      n = single(e.subject().kind == Kind::FrameRef ? "RowFilter" : "RowFilter.of", e);
      n.children.push_back(build(e.args[1], false));
      return n;
    case Kind::Eq:
    case Kind::NotEq:
    case Kind::Gt:
    case Kind::Ge:
    case Kind::Lt:
    case Kind::Le:
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
    case Kind::And:
    case Kind::Or:
    case Kind::Not: {
      n.template_id = std::string(kind_id(e.kind));
      bool compare = tcr::is_comparison(e.kind);
      for (std::size_t i = 0; i < e.args.size(); ++i) n.children.push_back(build(e.args[i], compare && i == 1));
      n.subject_arity = static_cast<int>(e.args.size());
      n.style = ErNode::Style::Descriptive;
      return n;
    }
    case Kind::Split:
      n = single(e.has_pattern ? "Split" : "Split.ws", e);
      if (e.has_pattern) n.slots["d"] = quote_value(e.pattern);
      return n;
    case Kind::Replace:
      n = single("Replace", e);
      n.slots["a"] = quote_value(e.pattern);
      n.slots["b"] = quote_value(e.replacement);
      return n;
    case Kind::CountOccurrences:
    case Kind::Contains:
      n = single(std::string(kind_id(e.kind)), e);
      n.slots["p"] = quote_value(e.pattern);
      return n;
    case Kind::ElemIndex:
      switch (e.index_kind) {
        case tcr::IndexKind::CharOfText: n = single("ElemIndex.char", e); break;
        case tcr::IndexKind::WordOfList: n = single("ElemIndex.word", e); break;
        case tcr::IndexKind::ElementOfSeries: n = single("ElemIndex.element", e); break;
        case tcr::IndexKind::TupleField:
          n = single("ElemIndex.field", e);
          n.slots["label"] = e.name;
          return n;
      }
      n.slots["k"] = index_text(e.index);
      return n;
    case Kind::SliceRows:
      if (e.lo && e.hi) n = single("SliceRows.range", e);
      else if (e.lo) n = single("SliceRows.from", e);
      else n = single("SliceRows.head", e);
      if (e.lo) n.slots["lo"] = std::to_string(adjust_index_outbound(*e.lo));
      if (e.hi) n.slots["hi"] = std::to_string(*e.hi);
      return n;
    case Kind::GroupBy: {
      n = single("GroupBy", e);
      std::string keys;
      for (const auto& k : e.keys) keys += (keys.empty() ? "" : " and ") + ("column " + column_text(k));
      n.slots["keys"] = keys;
      return n;
    }
    case Kind::DateCeil:
      n = single("DateCeil", e);
      n.slots["u"] = quote_value(e.name);
      return n;
    case Kind::Lower:
    case Kind::Strip:
    case Kind::Len:
    case Kind::Sum:
    case Kind::Min:
    case Kind::Max:
    case Kind::Mean:
    case Kind::Count:
    case Kind::RowCount:
    case Kind::IdxMax:
    case Kind::Shape:
    case Kind::GroupSize:
    case Kind::Transpose:
    case Kind::DateYear: return single(std::string(kind_id(e.kind)), e);
  }
  unavailable(std::string(kind_id(e.kind)));
}

std::string fill(const std::string& form, const ErNode& n, const Template& t) {
  std::string out;
  for (std::size_t i = 0; i < form.size(); ++i) {
    if (form[i] != '{') {
      out += form[i];
      continue;
    }
    std::size_t close = form.find('}', i);
    std::string slot = form.substr(i + 1, close - i - 1);
    i = close;
    if (slot == "0") out += render_inline(n.children.at(0), t.lhs_level);
    else if (slot == "1") out += render_inline(n.children.at(1), t.rhs_level);
    else if (slot == "m") out += render_inline(n.children.at(1), 1);
    else out += n.slots.at(slot);
  }
  return out;
}

}  // namespace

ErNode build_er_tree(const tcr::Expr& expr) { return build(expr, false); }

std::string render_inline(const ErNode& node, int min_level) {
  const Template& t = find_template(node.template_id);
  std::string text;
  if (t.kind == Kind::And || t.kind == Kind::Or) {
    std::string joiner = t.kind == Kind::And ? " and " : " or ";
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i) text += joiner;
      text += render_inline(node.children[i], t.lhs_level);
    }
  } else {
    text = fill(t.inline_form, node, t);
  }
  return t.level < min_level ? "(" + text + ")" : text;
}

// ---------------------------------------------------------------------------
// Layout

namespace {

bool is_chain(const ErNode& n) {
  if (!n.chainable) return false;
  const ErNode& subject = n.children.front();
  return subject.template_id == "FrameRef" || is_chain(subject);
}

void chain_steps(const ErNode& n, std::size_t statement, std::size_t depth, std::vector<Step>& out) {
  const ErNode& subject = n.children.front();
  if (subject.template_id != "FrameRef") chain_steps(subject, statement, depth + 1, out);
  const Template& t = find_template(n.template_id);
  out.push_back({fill(t.chain, n, t), statement, depth});
}

void expression_steps(const tcr::Expr& e, std::size_t statement, std::vector<Step>& out) {
  ErNode tree = build_er_tree(e);
  if (is_chain(tree)) {
    chain_steps(tree, statement, 0, out);
    return;
  }
  out.push_back({render_inline(tree, 0), statement, 0});
}

}  // namespace

std::vector<std::string> GroundedUtterance::texts() const {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(s.text);
  return out;
}

std::string GroundedUtterance::text() const { return concat_steps(texts()); }

GroundedUtterance generate_utterance(const tcr::Program& program) {
  tcr::Program p = tcr::inline_bindings(program);
  if (p.statements.empty()) unavailable("empty program");
  GroundedUtterance u;
  if (p.statements.size() == 1) {
    const auto& s = p.statements.front();
    if (s.kind == tcr::Statement::Kind::CreateColumn) u.steps.push_back({"create column " + column_text(s.name), 0, 0});
    expression_steps(s.expr, 0, u.steps);
    return u;
  }
  for (std::size_t i = 0; i < p.statements.size(); ++i) {
    const auto& s = p.statements[i];
    std::string body = render_inline(build_er_tree(s.expr), 0);
    if (s.kind == tcr::Statement::Kind::CreateColumn) body = "create column " + column_text(s.name) + " from " + body;
    u.steps.push_back({std::move(body), i, 0});
  }
  return u;
}

// ---------------------------------------------------------------------------
// Indices

std::int64_t adjust_index_outbound(std::int64_t i) {
  if (i < 0) throw Error(ErrorCode::InvalidArgument, "index must be non-negative");
  return i + 1;
}

std::int64_t adjust_index_inbound(std::int64_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "positions start at 1");
  return k - 1;
}

namespace {

constexpr std::array<std::string_view, 10> kOrdinals = {"first",   "second", "third",  "fourth", "fifth",
                                                        "sixth",   "seventh", "eighth", "ninth",  "tenth"};

struct IndexMatch {
  std::int64_t index;
  std::size_t length;
};

// Reads a position at the start of `text`.
std::optional<IndexMatch> read_index(std::string_view text) {
  std::size_t pos = 0;
  if (iequals_at(text, pos, "last")) return IndexMatch{-1, 4};
  for (std::size_t i = 0; i < kOrdinals.size(); ++i)
    if (iequals_at(text, pos, kOrdinals[i])) return IndexMatch{static_cast<std::int64_t>(i), kOrdinals[i].size()};
  if (iequals_at(text, pos, "position ")) pos += 9;
  std::size_t start = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == start || pos - start > 9) return std::nullopt;
  std::int64_t k = std::stoll(std::string(text.substr(start, pos - start)));
  if (k < 1) return std::nullopt;
  if (iequals_at(text, pos, " from the end")) return IndexMatch{-k, pos + 13};
  return IndexMatch{adjust_index_inbound(k), pos};
}

}  // namespace

std::optional<std::int64_t> detect_index(std::string_view phrase) {
  std::string p = lower(trim(phrase));
  if (p.rfind("the ", 0) == 0) p.erase(0, 4);
  for (std::string_view unit : {"element ", "character ", "word ", "item "})
    if (p.rfind(unit, 0) == 0) {
      p.erase(0, unit.size());
      break;
    }
  for (std::string_view prep : {"at ", "in "})
    if (p.rfind(prep, 0) == 0) {
      p.erase(0, prep.size());
      break;
    }
  auto m = read_index(p);
  if (!m) return std::nullopt;
  std::string rest = trim(std::string_view(p).substr(m->length));
  if (!rest.empty() && rest != "element" && rest != "character" && rest != "word" && rest != "item")
    return std::nullopt;
  return m->index;
}

// ---------------------------------------------------------------------------
// Step text helpers

std::vector<std::string> split_steps(std::string_view query) {
  std::string q = trim(query);
  std::vector<std::string> out;
  if (q.rfind("(1)", 0) != 0) {
    if (!q.empty()) out.push_back(q);
    return out;
  }
  std::size_t pos = 3;
  for (int k = 2;; ++k) {
    std::string marker = "(" + std::to_string(k) + ")";
    std::size_t next = pos;
    for (;;) {
      next = q.find(marker, next);
      if (next == std::string::npos) break;
      char before = q[next - 1];
      if (before == ' ' || before == ',' || before == ';') break;
      ++next;
    }
    std::string piece = trim(std::string_view(q).substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    while (!piece.empty() && (piece.back() == ',' || piece.back() == ';')) piece = trim(piece.substr(0, piece.size() - 1));
    out.push_back(piece);
    if (next == std::string::npos) break;
    pos = next + marker.size();
  }
  return out;
}

std::string concat_steps(const std::vector<std::string>& steps) {
  std::string out;
  int k = 0;
  for (const auto& s : steps) {
    std::string t = trim(s);
    if (t.empty()) continue;
    if (k) out += ", ";
    out += "(" + std::to_string(++k) + ") " + t;
  }
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "no steps to concatenate");
  return out;
}

std::string normalize_step(std::string_view step) {
  std::string s(step);
  for (auto g : kQuoteGlyphs) {
    std::size_t at;
    while ((at = s.find(g)) != std::string::npos) s.erase(at, g.size());
  }
  std::string collapsed;
  for (char c : s) {
    bool space = std::isspace(static_cast<unsigned char>(c));
    if (space && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed += space ? ' ' : c;
  }
  collapsed = trim(collapsed);
  if (!collapsed.empty() && collapsed.back() == '.') collapsed = trim(collapsed.substr(0, collapsed.size() - 1));
  return collapsed;
}

bool utterances_match(std::string_view a, std::string_view b) {
  auto sa = split_steps(a);
  auto sb = split_steps(b);
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (normalize_step(sa[i]) != normalize_step(sb[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Grounded-grammar parser

namespace {

struct Fail {};

// Collapses whitespace outside quoted spans and drops one trailing period.
std::string clean_step(std::string_view step) {
  std::string s = trim(step);
  std::string out;
  std::string_view closing;
  for (std::size_t i = 0; i < s.size();) {
    if (closing.empty()) {
      bool opened = false;
      for (std::size_t g = 0; g < kQuoteGlyphs.size(); ++g) {
        if (s.compare(i, kQuoteGlyphs[g].size(), kQuoteGlyphs[g]) == 0) {
          closing = g == 2 ? kQuoteGlyphs[3] : g == 4 ? kQuoteGlyphs[5] : kQuoteGlyphs[g];
          out += kQuoteGlyphs[g];
          i += kQuoteGlyphs[g].size();
          opened = true;
          break;
        }
      }
      if (opened) continue;
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        if (out.empty() || out.back() != ' ') out += ' ';
        ++i;
        continue;
      }
      out += s[i++];
    } else {
      if (s.compare(i, closing.size(), closing) == 0) {
        out += closing;
        i += closing.size();
        closing = {};
        continue;
      }
      out += s[i++];
    }
  }
  out = trim(out);
  while (!out.empty() && out.back() == ',') out = trim(out.substr(0, out.size() - 1));
  if (!out.empty() && out.back() == '.') out = trim(out.substr(0, out.size() - 1));
  return out;
}

struct Segment {
  bool slot;
  std::string text;
};

std::vector<Segment> segments(const std::string& form) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < form.size()) {
    std::size_t open = form.find('{', i);
    if (open == std::string::npos) {
      out.push_back({false, form.substr(i)});
      break;
    }
    if (open > i) out.push_back({false, form.substr(i, open - i)});
    std::size_t close = form.find('}', open);
    out.push_back({true, form.substr(open + 1, close - open - 1)});
    i = close + 1;
  }
  return out;
}

struct Slots {
  std::optional<std::string> c, p, d, a, b, u, label;
  std::optional<std::int64_t> k, lo, hi;
  std::vector<std::string> keys;
  std::optional<tcr::Expr> e0, m;

  std::optional<std::string>* text(const std::string& name) {
    if (name == "c") return &c;
    if (name == "p") return &p;
    if (name == "d") return &d;
    if (name == "a") return &a;
    if (name == "b") return &b;
    if (name == "u") return &u;
    return nullptr;
  }
};

class GroundedParser {
 public:
  GroundedParser(std::string_view text, const std::vector<std::string>& names) : s_(text), names_(names) {
    // Longest names first so prefixes never shadow longer columns.
    std::sort(names_.begin(), names_.end(), [](const auto& x, const auto& y) { return x.size() > y.size(); });
  }

  bool at_end() const { return pos_ == s_.size(); }

  /// One instruction applied to `subject`.
  std::optional<tcr::Expr> chain_step(const tcr::Expr& subject) {
    for (const auto& t : template_table()) {
      if (t.chain.empty()) continue;
      std::size_t saved = pos_;
      try {
        Slots slots;
        match(t, t.chain, slots, true);
        if (!at_end()) throw Fail{};
        return make(t, slots, subject);
      } catch (const Fail&) {
        pos_ = saved;
      }
    }
    return std::nullopt;
  }

  tcr::Expr whole_expression() {
    tcr::Expr e = expr(0);
    if (!at_end()) throw Fail{};
    return e;
  }

 private:
  bool lit(std::string_view l) {
    if (!iequals_at(s_, pos_, l)) return false;
    pos_ += l.size();
    return true;
  }

  bool boundary(std::size_t at) const {
    return at == s_.size() || s_[at] == ' ' || s_[at] == ')' || s_[at] == ',';
  }

  std::optional<std::string> quoted() {
    for (std::size_t g = 0; g < kQuoteGlyphs.size(); ++g) {
      std::string_view open = kQuoteGlyphs[g];
      if (s_.compare(pos_, open.size(), open) != 0) continue;
      std::vector<std::string_view> closers = {open};
      if (g == 2 || g == 3) closers = {kQuoteGlyphs[3], "'"};
      if (g == 4 || g == 5) closers = {kQuoteGlyphs[5], "\""};
      std::size_t start = pos_ + open.size();
      std::size_t best = std::string::npos;
      std::size_t best_len = 0;
      for (auto c : closers) {
        std::size_t at = s_.find(c, start);
        if (at < best) {
          best = at;
          best_len = c.size();
        }
      }
      if (best == std::string::npos) throw Fail{};
      std::string value(s_.substr(start, best - start));
      pos_ = best + best_len;
      return value;
    }
    return std::nullopt;
  }

  std::string value_slot(const std::optional<std::string>& next_literal) {
    if (auto q = quoted()) return *q;
    std::size_t end = next_literal ? ifind(s_, *next_literal, pos_) : s_.size();
    if (end == std::string_view::npos || end == pos_) throw Fail{};
    std::string v(s_.substr(pos_, end - pos_));
    pos_ = end;
    return v;
  }

  std::string column_slot() {
    if (auto q = quoted()) return *q;
    for (const auto& n : names_)
      if (s_.compare(pos_, n.size(), n) == 0 && boundary(pos_ + n.size())) {
        pos_ += n.size();
        return n;
      }
    for (const auto& n : names_)
      if (iequals_at(s_, pos_, n) && boundary(pos_ + n.size())) {
        pos_ += n.size();
        return n;
      }
    throw Fail{};
  }

  std::int64_t integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start || pos_ - start > 9) throw Fail{};
    return std::stoll(std::string(s_.substr(start, pos_ - start)));
  }

  void match(const Template& t, const std::string& form, Slots& slots, bool chain) {
    auto segs = segments(form);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const Segment& seg = segs[i];
      if (!seg.slot) {
        if (!lit(seg.text)) throw Fail{};
        continue;
      }
      std::optional<std::string> next;
      if (i + 1 < segs.size() && !segs[i + 1].slot) next = segs[i + 1].text;
      const std::string& name = seg.text;
      if (auto* text = slots.text(name)) {
        *text = name == "c" ? column_slot() : value_slot(next);
      } else if (name == "k") {
        auto m = read_index(s_.substr(pos_));
        if (!m) throw Fail{};
        slots.k = m->index;
        pos_ += m->length;
      } else if (name == "label") {
        if (lit("rows")) slots.label = "rows";
        else if (lit("columns")) slots.label = "columns";
        else throw Fail{};
      } else if (name == "lo") {
        std::int64_t v = integer();
        if (v < 1) throw Fail{};
        slots.lo = v - 1;
      } else if (name == "hi") {
        slots.hi = integer();
      } else if (name == "keys") {
        do {
          if (!lit("column ")) throw Fail{};
          slots.keys.push_back(column_slot());
        } while (iequals_at(s_, pos_, " and column ") && lit(" and "));
      } else if (name == "0") {
        slots.e0 = expr(t.lhs_level);
      } else if (name == "m") {
        slots.m = expr(1);
      } else {
        throw Fail{};
      }
    }
    (void)chain;
  }

  static tcr::Expr make(const Template& t, Slots& s, tcr::Expr subject) {
    const std::string& id = t.id;
    switch (t.kind) {
      case Kind::FrameRef: return tcr::frame_ref();
      case Kind::ColProject: return tcr::col(std::move(subject), *s.c);
      case Kind::RowFilter: return tcr::row_filter(std::move(subject), std::move(*s.m));
      case Kind::Split:
        return tcr::split(std::move(subject), id == "Split.ws" ? std::nullopt : std::optional<std::string>(*s.d));
      case Kind::Replace: return tcr::replace(std::move(subject), *s.a, *s.b);
      case Kind::CountOccurrences:
      case Kind::Contains: return tcr::pattern_op(t.kind, std::move(subject), *s.p);
      case Kind::ElemIndex:
        if (id == "ElemIndex.field")
          return tcr::elem_index(std::move(subject), *s.label == "rows" ? 0 : 1, tcr::IndexKind::TupleField, *s.label);
        if (id.rfind("ElemIndex.char", 0) == 0) return tcr::elem_index(std::move(subject), *s.k, tcr::IndexKind::CharOfText);
        if (id.rfind("ElemIndex.word", 0) == 0) return tcr::elem_index(std::move(subject), *s.k, tcr::IndexKind::WordOfList);
        return tcr::elem_index(std::move(subject), *s.k, tcr::IndexKind::ElementOfSeries);
      case Kind::SliceRows: return tcr::slice_rows(std::move(subject), s.lo, s.hi);
      case Kind::GroupBy: return tcr::group_by(std::move(subject), s.keys);
      case Kind::DateCeil: return tcr::date_ceil(std::move(subject), *s.u);
      default: return tcr::unary_op(t.kind, std::move(subject));
    }
  }

  // Phrases whose subject comes from an inline {0} slot.
  std::optional<tcr::Expr> prefix(int level) {
    for (const auto& t : template_table()) {
      if (t.level != level || t.inline_form.empty() || t.inline_form.front() == '{') continue;
      if (t.inline_form.find("{0}") == std::string::npos) continue;
      std::size_t saved = pos_;
      try {
        Slots slots;
        match(t, t.inline_form, slots, false);
        return make(t, slots, std::move(*slots.e0));
      } catch (const Fail&) {
        pos_ = saved;
      }
    }
    // Row selection straight off the table.
    if (level == 0 && lit("rows where ")) return tcr::row_filter(tcr::frame_ref(), expr(1));
    return std::nullopt;
  }

  tcr::Expr expr(int min_level) {
    if (min_level <= 0) {
      std::size_t saved = pos_;
      try {
        if (auto e = prefix(0)) return *e;
      } catch (const Fail&) {
        pos_ = saved;
      }
      min_level = 1;
    }
    switch (min_level) {
      case 1: return nary_level(" or ", Kind::Or, 2);
      case 2: return nary_level(" and ", Kind::And, 3);
      case 3:
        if (lit("not ")) return tcr::negate(expr(3));
        return expr(4);
      case 4: return comparison();
      case 5: return binary_level({{" + ", Kind::Add}, {" - ", Kind::Sub}}, 6);
      case 6: return binary_level({{" multiplied by ", Kind::Mul}, {" divided by ", Kind::Div}}, 7);
      case 7:
        if (auto e = prefix(7)) return *e;
        return atom();
      default: return atom();
    }
  }

  tcr::Expr nary_level(std::string_view joiner, Kind k, int operand_level) {
    std::vector<tcr::Expr> ops;
    ops.push_back(expr(operand_level));
    while (iequals_at(s_, pos_, joiner)) {
      pos_ += joiner.size();
      ops.push_back(expr(operand_level));
    }
    if (ops.size() == 1) return std::move(ops.front());
    return tcr::nary(k, std::move(ops));
  }

  tcr::Expr binary_level(std::vector<std::pair<std::string_view, Kind>> ops, int operand_level) {
    tcr::Expr lhs = expr(operand_level);
    for (;;) {
      bool matched = false;
      for (const auto& [text, kind] : ops) {
        if (!iequals_at(s_, pos_, text)) continue;
        pos_ += text.size();
        lhs = tcr::binary(kind, std::move(lhs), expr(operand_level));
        matched = true;
        break;
      }
      if (!matched) return lhs;
    }
  }

  bool at_terminator() const {
    return pos_ == s_.size() || iequals_at(s_, pos_, " and ") || iequals_at(s_, pos_, " or ") ||
           (depth_ > 0 && s_[pos_] == ')');
  }

  tcr::Expr comparison() {
    static const std::vector<std::pair<std::string_view, Kind>> ops = {
        {" greater than or equal to ", Kind::Ge}, {" less than or equal to ", Kind::Le},
        {" greater than ", Kind::Gt},             {" less than ", Kind::Lt},
        {" is not ", Kind::NotEq},                {" NotEq ", Kind::NotEq},
        {" is ", Kind::Eq},                       {" >= ", Kind::Ge},
        {" <= ", Kind::Le},                       {" != ", Kind::NotEq},
        {" == ", Kind::Eq},                       {" > ", Kind::Gt},
        {" < ", Kind::Lt}};
    tcr::Expr lhs = expr(5);
    for (const auto& [text, kind] : ops) {
      if (!iequals_at(s_, pos_, text)) continue;
      pos_ += text.size();
      return tcr::binary(kind, std::move(lhs), comparison_rhs());
    }
    return lhs;
  }

  // Structured operand if one parses cleanly up to a terminator, otherwise
  // bare text running to the next terminator.
  tcr::Expr comparison_rhs() {
    std::size_t start = pos_;
    try {
      tcr::Expr e = expr(5);
      if (at_terminator()) return e;
    } catch (const Fail&) {
    }
    pos_ = start;
    std::size_t end = pos_;
    while (end < s_.size()) {
      if (iequals_at(s_, end, " and ") || iequals_at(s_, end, " or ") || (depth_ > 0 && s_[end] == ')')) break;
      ++end;
    }
    if (end == start) throw Fail{};
    std::string text(s_.substr(start, end - start));
    pos_ = end;
    return tcr::literal(Value::text(trim(text)));
  }

  tcr::Expr atom() {
    if (lit("(")) {
      ++depth_;
      tcr::Expr e = expr(0);
      --depth_;
      if (!lit(")")) throw Fail{};
      return e;
    }
    if (lit("the table")) return tcr::frame_ref();
    if (lit("column ")) return tcr::col(column_slot());
    if (auto q = quoted()) return tcr::literal(Value::text(*q));
    for (std::string_view b : {"true", "false"})
      if (iequals_at(s_, pos_, b) && boundary(pos_ + b.size())) {
        pos_ += b.size();
        return tcr::literal(Value::boolean(b == "true"));
      }
    std::size_t end = pos_;
    if (end < s_.size() && (s_[end] == '-' || s_[end] == '+')) ++end;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                               ((s_[end] == '-' || s_[end] == '+') && (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    if (end > pos_ && boundary(end)) {
      if (auto n = parse_number(s_.substr(pos_, end - pos_))) {
        pos_ = end;
        return tcr::literal(Value::number(*n));
      }
    }
    throw Fail{};
  }

  std::string_view s_;
  std::vector<std::string> names_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

std::string nearest_template(std::string_view step) {
  std::string best;
  std::size_t best_score = 0;
  for (const auto& t : template_table()) {
    for (const std::string* form : {&t.chain, &t.inline_form}) {
      if (form->empty()) continue;
      std::string head = form->substr(0, form->find('{'));
      std::size_t n = 0;
      while (n < head.size() && n < step.size() &&
             std::tolower(static_cast<unsigned char>(head[n])) == std::tolower(static_cast<unsigned char>(step[n])))
        ++n;
      if (n > best_score) {
        best_score = n;
        best = *form;
      }
    }
  }
  return best.empty() ? "select column {c}" : best;
}

[[noreturn]] void mismatch(std::size_t step, std::string_view text, const std::string& detail = {}) {
  std::string msg = "step " + std::to_string(step + 1) + " does not match the grounded grammar: '" +
                    std::string(text) + "' (nearest template: '" + nearest_template(text) + "')";
  if (!detail.empty()) msg += "; " + detail;
  throw Error(ErrorCode::GrammarMismatch, msg);
}

tcr::Expr chain_or_descriptive(const std::vector<std::string>& steps, std::size_t first,
                               const std::vector<std::string>& names) {
  tcr::Expr subject = tcr::frame_ref();
  for (std::size_t i = first; i < steps.size(); ++i) {
    GroundedParser p(steps[i], names);
    auto next = p.chain_step(subject);
    if (!next) {
      if (i == first && steps.size() == first + 1) {
        try {
          GroundedParser d(steps[i], names);
          return d.whole_expression();
        } catch (const Fail&) {
        }
      }
      mismatch(i, steps[i]);
    }
    subject = std::move(*next);
  }
  return subject;
}

tcr::Expr descriptive(const std::string& text, std::size_t step, const std::vector<std::string>& names) {
  try {
    GroundedParser p(text, names);
    return p.whole_expression();
  } catch (const Fail&) {
    mismatch(step, text);
  }
}

struct CreateHead {
  std::string name;
  std::optional<std::string> body;  // text after " from "
};

std::optional<CreateHead> create_head(const std::string& step) {
  if (!iequals_at(step, 0, "create column ")) return std::nullopt;
  std::string rest = step.substr(14);
  for (std::size_t g = 0; g < kQuoteGlyphs.size(); ++g) {
    std::string_view open = kQuoteGlyphs[g];
    if (rest.compare(0, open.size(), open) != 0) continue;
    std::string_view close = g == 2 ? kQuoteGlyphs[3] : g == 4 ? kQuoteGlyphs[5] : open;
    std::size_t end = rest.find(close, open.size());
    if (end == std::string::npos) return std::nullopt;
    CreateHead h{rest.substr(open.size(), end - open.size()), std::nullopt};
    std::string tail = rest.substr(end + close.size());
    if (tail.empty()) return h;
    if (!iequals_at(tail, 0, " from ")) return std::nullopt;
    h.body = tail.substr(6);
    return h;
  }
  std::size_t from = ifind(rest, " from ", 0);
  if (from == std::string::npos) return CreateHead{trim(rest), std::nullopt};
  return CreateHead{trim(rest.substr(0, from)), rest.substr(from + 6)};
}

bool is_text_literal(const tcr::Expr& e) { return e.kind == Kind::Literal && e.literal.is_text(); }

// Reads text literals compared against dates as dates.
void coerce_dates(tcr::Expr& e, const tcr::Schema& schema) {
  for (auto& a : e.args) coerce_dates(a, schema);
  if (!tcr::is_comparison(e.kind)) return;
  for (int side = 0; side < 2; ++side) {
    tcr::Expr& lit = e.args[static_cast<std::size_t>(side)];
    const tcr::Expr& other = e.args[static_cast<std::size_t>(1 - side)];
    if (!is_text_literal(lit)) continue;
    try {
      tcr::Type t = tcr::infer_type(other, schema);
      if ((t.is_series() || t.is_scalar()) && t.elem == ElemType{CellType::Date, false})
        if (auto d = tcr::parse_date_literal(lit.literal.as_text())) lit.literal = Value::date(*d);
    } catch (const Error&) {
    }
  }
}

}  // namespace

tcr::Program parse_grounded(const std::vector<std::string>& raw_steps, const tcr::Schema& schema) {
  std::vector<std::string> steps;
  for (const auto& s : raw_steps) {
    std::string c = clean_step(s);
    if (!c.empty()) steps.push_back(std::move(c));
  }
  if (steps.empty()) throw Error(ErrorCode::GrammarMismatch, "no steps to interpret");

  std::vector<std::string> names = schema.names();
  tcr::Schema running = schema;
  tcr::Program program;
  auto add = [&](tcr::Statement::Kind kind, std::string name, tcr::Expr e) {
    coerce_dates(e, running);
    if (kind == tcr::Statement::Kind::CreateColumn) {
      try {
        tcr::Type t = tcr::infer_type(e, running);
        if (t.is_series() || t.is_scalar()) running.set(name, t.elem);
      } catch (const Error&) {
      }
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
    program.statements.push_back({kind, std::move(name), std::move(e)});
  };

  auto head = create_head(steps.front());
  if (head && head->body) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      auto h = create_head(steps[i]);
      if (h && h->body) {
        add(tcr::Statement::Kind::CreateColumn, h->name, descriptive(*h->body, i, names));
      } else if (i + 1 == steps.size()) {
        add(tcr::Statement::Kind::Yield, "", descriptive(steps[i], i, names));
      } else {
        mismatch(i, steps[i], "expected 'create column {name} from ...'");
      }
    }
  } else if (head) {
    if (steps.size() < 2) mismatch(0, steps[0], "a new column needs a following step");
    if (head->name.empty()) mismatch(0, steps[0], "missing column name");
    add(tcr::Statement::Kind::CreateColumn, head->name, chain_or_descriptive(steps, 1, names));
  } else {
    add(tcr::Statement::Kind::Yield, "", chain_or_descriptive(steps, 0, names));
  }

  try {
    return tcr::typecheck(std::move(program), schema);
  } catch (const Error& e) {
    throw Error(ErrorCode::GrammarMismatch, std::string("steps do not describe a valid computation: ") + e.what());
  }
}

}  // namespace nl2grid::utterance
