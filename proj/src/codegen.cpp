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


#include "nl2grid/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "nl2grid/error.hpp"
#include "nl2grid/object_code.hpp"
#include "nl2grid/utterance.hpp"

namespace nl2grid::codegen {

extern const char* const kBundledRulesJson;  // mock_rules.cpp, generated

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fold_query(std::string_view q) {
  std::string out;
  bool space = false;
  for (char c : q) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string column_literal(const Column& c, std::size_t rows) {
  std::string out = object::quote_string(c.name) + ": [";
  for (std::size_t i = 0; i < rows; ++i) {
    if (i) out += ", ";
    out += cell_literal(c.cells[i]);
  }
  return out + "]";
}

std::string frame_literal(const Table& t) {
  std::size_t rows = t.num_rows();
  std::string out;
  if (rows > kFullLiteralRows) {
    out += "# df has " + std::to_string(rows) + " rows; columns:";
    for (const Column& c : t.columns()) out += " " + object::quote_string(c.name) + " (" + to_string(c.type) + ")";
    out += "\n# first " + std::to_string(kSampleRows) + " rows shown\n";
    rows = kSampleRows;
  }
  out += "df = pd.DataFrame({";
  for (std::size_t i = 0; i < t.num_columns(); ++i) {
    if (i) out += ", ";
    out += column_literal(t.columns()[i], rows);
  }
  return out + "})";
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() > 3 && cur.back() == 's') cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else flush();
  }
  flush();
  return out;
}

std::string strip_quotes(std::string m) {
  if (m.size() >= 2 && (m.front() == '\'' || m.front() == '"') && m.back() == m.front())
    m = m.substr(1, m.size() - 2);
  return m;
}

std::string strip_mention(std::string_view s) {
  std::string m = trim(s);
  for (std::string_view prefix : {"the ", "column ", "col "}) {
    if (lower(m).starts_with(prefix)) m = trim(std::string_view(m).substr(prefix.size()));
  }
  for (std::string_view suffix : {" column", " col"}) {
    if (lower(m).ends_with(suffix)) m = trim(std::string_view(m).substr(0, m.size() - suffix.size()));
  }
  return strip_quotes(m);
}

std::string normalize_query(std::string_view q) {
  std::string out = fold_query(q);
  while (!out.empty() && (out.back() == '.' || out.back() == '?')) out.pop_back();
  return trim(out);
}

// Expands placeholders; nullopt when a {col:N} finds no column.
std::optional<std::string> expand(const std::string& code, const std::smatch& m, const tcr::Schema& schema) {
  static const std::regex placeholder(R"(\{(?:(str|col):)?([0-9]+)\})");
  std::string out;
  auto begin = code.cbegin();
  for (std::sregex_iterator it(code.begin(), code.end(), placeholder), end; it != end; ++it) {
    const std::smatch& p = *it;
    out.append(begin, p[0].first);
    begin = p[0].second;
    std::size_t n = std::stoul(p[2].str());
    std::string cap = n < m.size() ? trim(m[n].str()) : std::string();
    std::string kind = p[1].str();
    if (kind == "str") {
      out += object::quote_string(strip_quotes(cap));
    } else if (kind == "col") {
      std::string c = fuzzy_column(cap, schema);
      if (c.empty()) return std::nullopt;
      out += object::quote_string(c);
    } else {
      out += cap;
    }
  }
  out.append(begin, code.cend());
  return out;
}

Completion timed(std::string text, std::string backend, Clock::time_point start) {
  return {std::move(text), std::move(backend),
          std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)};
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string cell_literal(const Value& v) {
  if (v.is_missing()) return "None";
  if (v.is_bool()) return v.as_bool() ? "True" : "False";
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_date()) return "pd.Timestamp('" + v.as_date().iso() + "')";
  if (v.is_text()) return object::quote_string(v.as_text());
  std::string out = "[";
  const auto& items = v.as_list();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += cell_literal(items[i]);
  }
  return out + "]";
}

std::string Prompt::assembled() const {
  return language_header + "\n" + library_header + "\n" + frame_literal + "\n" + query_comment + "\n";
}

Prompt build_prompt(const Table& table, std::string_view query) {
  std::string q = fold_query(query);
  if (q.empty()) throw Error(ErrorCode::InvalidArgument, "query is empty");
  Prompt p;
  p.language_header = "# Python 3";
  p.library_header = "import pandas as pd";
  p.frame_literal = frame_literal(table);
  p.query_comment = "# " + q;
  p.query = q;
  p.schema = tcr::Schema::from_table(table);
  return p;
}

std::string truncate_at_stop(std::string_view text, std::string_view stop) {
  if (stop.empty()) return std::string(text);
  auto pos = text.find(stop);
  return std::string(pos == std::string_view::npos ? text : text.substr(0, pos));
}

std::vector<MockRule> parse_rules(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("rules file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::InvalidArgument, "rules file must be a JSON array");
  std::vector<MockRule> rules;
  for (const auto& r : doc) {
    if (!r.is_object() || !r.contains("pattern") || !r.contains("code") || !r["pattern"].is_string() ||
        !r["code"].is_string())
      throw Error(ErrorCode::InvalidArgument, "each rule needs string fields pattern and code");
    MockRule rule{r["pattern"].get<std::string>(), r["code"].get<std::string>()};
    try {
      std::regex check(rule.pattern, std::regex::icase);
    } catch (const std::regex_error&) {
      throw Error(ErrorCode::InvalidArgument, "bad rule pattern: " + rule.pattern);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

const std::vector<MockRule>& bundled_rules() {
  static const std::vector<MockRule> rules = parse_rules(kBundledRulesJson);
  return rules;
}

BackendConfig BackendConfig::mock() { return {}; }

BackendConfig BackendConfig::http_from_env() {
  BackendConfig cfg;
  cfg.kind = Kind::Http;
  const char* url = std::getenv("NL2GRID_API_URL");
  const char* key = std::getenv("NL2GRID_API_KEY");
  const char* model = std::getenv("NL2GRID_MODEL");
  if (url) cfg.endpoint = url;
  if (key) cfg.token = key;
  if (model && *model) cfg.model = model;
  cfg.validate();
  return cfg;
}

void BackendConfig::validate() const {
  if (kind != Kind::Http) return;
  if (endpoint.empty()) throw Error(ErrorCode::InvalidArgument, "http backend needs an endpoint (NL2GRID_API_URL)");
  if (token.empty()) throw Error(ErrorCode::InvalidArgument, "http backend needs a token (NL2GRID_API_KEY)");
  if (max_attempts < 1) throw Error(ErrorCode::InvalidArgument, "max_attempts must be positive");
}

std::string fuzzy_column(std::string_view mention, const tcr::Schema& schema) {
  std::string m = strip_mention(mention);
  if (m.empty()) return {};
  if (schema.contains(m)) return m;
  std::string lm = lower(m);
  auto names = schema.names();
  for (const auto& n : names)
    if (lower(n) == lm) return n;

  auto mw = words(m);
  std::string joined;
  for (const auto& w : mw) joined += w;
  for (const auto& n : names) {
    std::string nj;
    for (const auto& w : words(n)) nj += w;
    if (!nj.empty() && nj == joined) return n;
  }

  std::set<std::string> ms(mw.begin(), mw.end());
  std::string best;
  double best_score = 0;
  for (const auto& n : names) {
    auto nw = words(n);
    std::set<std::string> ns(nw.begin(), nw.end());
    std::size_t shared = 0;
    for (const auto& w : ms) shared += ns.count(w);
    if (shared == 0) continue;
    double score = static_cast<double>(shared) / static_cast<double>(ms.size() + ns.size() - shared);
    if (score > best_score) {
      best_score = score;
      best = n;
    }
  }
  return best;
}

Completion mock_generate(std::string_view query, const tcr::Schema& schema, const std::vector<MockRule>& rules) {
  auto start = Clock::now();
  try {
    auto steps = utterance::split_steps(query);
    tcr::Program program = utterance::parse_grounded(steps, schema);
    return timed(tcr::render_code(program, schema), "mock", start);
  } catch (const Error&) {
    // not grounded; fall through to the rules
  }
  std::string q = normalize_query(query);
  for (const MockRule& rule : rules) {
    std::regex re(rule.pattern, std::regex::icase | std::regex::ECMAScript);
    std::smatch m;
    if (!std::regex_match(q, m, re)) continue;
    if (auto code = expand(rule.code, m, schema)) return timed(*code, "mock", start);
  }
  return timed("", "mock", start);
}

std::string completion_text_from_response(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::TransportError, "endpoint returned a body that is not JSON");
  }
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const auto& c = doc["choices"][0];
    if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
    if (c.contains("message") && c["message"].is_object() && c["message"].contains("content") &&
        c["message"]["content"].is_string())
      return c["message"]["content"].get<std::string>();
  }
  for (const char* key : {"completion", "text"})
    if (doc.contains(key) && doc[key].is_string()) return doc[key].get<std::string>();
  throw Error(ErrorCode::TransportError, "endpoint response carries no completion text");
}

Completion generate(const BackendConfig& cfg, const Prompt& prompt, const GenParams& params) {
  cfg.validate();
  if (cfg.kind == BackendConfig::Kind::Mock) {
    Completion c = mock_generate(prompt.query, prompt.schema, cfg.rules);
    c.text = truncate_at_stop(c.text, params.stop);
    return c;
  }

  auto start = Clock::now();
  auto [base, path] = split_url(cfg.endpoint);
  json body = {{"model", cfg.model},
               {"prompt", prompt.assembled()},
               {"temperature", params.temperature},
               {"max_tokens", params.max_tokens},
               {"stop", json::array({params.stop})}};
  std::string payload = body.dump();

  std::string last_error;
  auto delay = cfg.backoff;
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(base);
    client.set_connection_timeout(cfg.timeout);
    client.set_read_timeout(cfg.timeout);
    client.set_write_timeout(cfg.timeout);
    httplib::Headers headers = {{"Authorization", "Bearer " + cfg.token}};
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw Error(ErrorCode::AuthError, "endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw Error(ErrorCode::TransportError, "endpoint answered HTTP " + std::to_string(res->status));
    std::string text = truncate_at_stop(completion_text_from_response(res->body), params.stop);
    return timed(std::move(text), "http:" + cfg.model, start);
  }
  throw Error(ErrorCode::TransportError, "endpoint unreachable after " + std::to_string(cfg.max_attempts) +
                                             " attempts: " + last_error);
}

}  // namespace nl2grid::codegen
