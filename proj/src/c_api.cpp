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


#include "nl2grid/nl2grid.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "json_io.hpp"
#include "nl2grid/bench.hpp"
#include "nl2grid/codegen.hpp"
#include "nl2grid/error.hpp"
#include "nl2grid/service.hpp"
#include "nl2grid/tcr.hpp"
#include "nl2grid/utterance.hpp"

struct nl2grid_table {
  nl2grid::Table table;
};

struct nl2grid_backend {
  nl2grid::codegen::BackendConfig config;
};

struct nl2grid_session {
  explicit nl2grid_session(const nl2grid::codegen::BackendConfig& cfg) : store(cfg) {}
  nl2grid::service::SessionStore store;
  std::string id;
};

namespace {

using nl2grid::Error;
using nl2grid::ErrorCode;

static_assert(static_cast<int>(ErrorCode::IoError) + 1 == NL2GRID_IO_ERROR);
static_assert(static_cast<int>(ErrorCode::UndisplayableOutput) + 1 == NL2GRID_UNDISPLAYABLE_OUTPUT);

thread_local std::string g_last_error;

nl2grid_status status_of(ErrorCode code) { return static_cast<nl2grid_status>(static_cast<int>(code) + 1); }

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
nl2grid_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NL2GRID_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NL2GRID_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, std::string("cannot read ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nl2grid_status view_status(const nl2grid::service::ResultView& v) {
  if (v.backend_error && v.error_code) {
    g_last_error = v.message;
    return status_of(*v.error_code);
  }
  return NL2GRID_OK;
}

}  // namespace

extern "C" {

const char* nl2grid_version(void) { return "0.1.0"; }

const char* nl2grid_status_name(nl2grid_status status) {
  if (status == NL2GRID_OK) return "Ok";
  if (status == NL2GRID_INTERNAL) return "Internal";
  if (status < NL2GRID_OK || status > NL2GRID_INTERNAL) return "Unknown";
  static thread_local std::string name;
  name = std::string(nl2grid::to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1)));
  return name.c_str();
}

const char* nl2grid_last_error(void) { return g_last_error.c_str(); }

void nl2grid_string_free(char* s) { std::free(s); }

nl2grid_status nl2grid_table_parse_csv(const char* text, size_t len, nl2grid_table** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(text && out, "text and out are required");
    *out = new nl2grid_table{nl2grid::parse_csv(std::string_view(text, len))};
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_table_load(const char* path, nl2grid_table** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(path && out, "path and out are required");
    *out = new nl2grid_table{nl2grid::parse_csv(read_file(path))};
    return NL2GRID_OK;
  });
}

void nl2grid_table_free(nl2grid_table* table) { delete table; }

size_t nl2grid_table_num_rows(const nl2grid_table* table) { return table ? table->table.num_rows() : 0; }

size_t nl2grid_table_num_columns(const nl2grid_table* table) { return table ? table->table.num_columns() : 0; }

nl2grid_status nl2grid_table_to_json(const nl2grid_table* table, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(table && out, "table and out are required");
    *out = dup(nl2grid::io::table_to_json(table->table).dump());
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_table_to_csv(const nl2grid_table* table, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(table && out, "table and out are required");
    *out = dup(nl2grid::serialize_csv(table->table));
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_backend_mock(const char* rules_json, nl2grid_backend** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(out, "out is required");
    auto cfg = nl2grid::codegen::BackendConfig::mock();
    if (rules_json) cfg.rules = nl2grid::codegen::parse_rules(rules_json);
    *out = new nl2grid_backend{std::move(cfg)};
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_backend_http(const char* endpoint, const char* model, const char* token,
                                    nl2grid_backend** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(endpoint && token && out, "endpoint, token and out are required");
    nl2grid::codegen::BackendConfig cfg;
    cfg.kind = nl2grid::codegen::BackendConfig::Kind::Http;
    cfg.endpoint = endpoint;
    cfg.token = token;
    if (model && *model) cfg.model = model;
    cfg.validate();
    *out = new nl2grid_backend{std::move(cfg)};
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_backend_http_from_env(nl2grid_backend** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(out, "out is required");
    *out = new nl2grid_backend{nl2grid::codegen::BackendConfig::http_from_env()};
    return NL2GRID_OK;
  });
}

void nl2grid_backend_free(nl2grid_backend* backend) { delete backend; }

nl2grid_status nl2grid_prompt(const nl2grid_table* table, const char* query, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(table && query && out, "table, query and out are required");
    *out = dup(nl2grid::codegen::build_prompt(table->table, query).assembled());
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_explain(const char* code, const nl2grid_table* table, int as_json, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(code && table && out, "code, table and out are required");
    auto schema = nl2grid::tcr::Schema::from_table(table->table);
    auto program = nl2grid::tcr::translate_source(code, schema);
    auto g = nl2grid::utterance::generate_utterance(program);
    if (!as_json) {
      *out = dup(g.text());
    } else {
      nlohmann::json doc = {{"steps", g.texts()},
                            {"utterance", g.text()},
                            {"tcr", nlohmann::json::parse(nl2grid::tcr::to_json(program, -1))}};
      *out = dup(doc.dump(2));
    }
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_session_create(const nl2grid_backend* backend, const nl2grid_table* table,
                                      nl2grid_session** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(backend && table && out, "backend, table and out are required");
    auto s = std::make_unique<nl2grid_session>(backend->config);
    s->id = s->store.create(table->table);
    *out = s.release();
    return NL2GRID_OK;
  });
}

void nl2grid_session_free(nl2grid_session* session) { delete session; }

nl2grid_status nl2grid_session_query(nl2grid_session* session, const char* query, int debug, char** out_json) {
  if (out_json) *out_json = nullptr;
  return guarded([&] {
    require(session && query && out_json, "session, query and out_json are required");
    auto v = session->store.query(session->id, query, debug != 0);
    *out_json = dup(nl2grid::service::result_view_json(v, 2));
    return view_status(v);
  });
}

nl2grid_status nl2grid_session_steps(nl2grid_session* session, const char* const* steps, size_t count, int debug,
                                     char** out_json) {
  if (out_json) *out_json = nullptr;
  return guarded([&] {
    require(session && out_json && (steps || count == 0), "session, steps and out_json are required");
    std::vector<std::string> list;
    for (size_t i = 0; i < count; ++i) list.emplace_back(steps[i] ? steps[i] : "");
    auto v = session->store.update_and_go(session->id, list, debug != 0);
    *out_json = dup(nl2grid::service::result_view_json(v, 2));
    return view_status(v);
  });
}

nl2grid_status nl2grid_session_info(const nl2grid_session* session, char** out_json) {
  if (out_json) *out_json = nullptr;
  return guarded([&] {
    require(session && out_json, "session and out_json are required");
    *out_json = dup(nl2grid::service::session_json(session->store.get(session->id), 2));
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_bench_run(const char* corpus_dir, const nl2grid_backend* backend, unsigned workers,
                                 const char* label, char** out_text, char** out_json) {
  if (out_text) *out_text = nullptr;
  if (out_json) *out_json = nullptr;
  return guarded([&] {
    require(corpus_dir && backend, "corpus_dir and backend are required");
    auto cases = nl2grid::bench::load_corpus(corpus_dir);
    auto records = nl2grid::bench::run_all(cases, backend->config, workers);
    auto report = nl2grid::bench::report(records);
    if (out_text) *out_text = dup(report.render(label && *label ? label : "corpus"));
    if (out_json) *out_json = dup(nl2grid::bench::report_json(report, records));
    return NL2GRID_OK;
  });
}

nl2grid_status nl2grid_serve(const nl2grid_backend* backend, const char* host, int port, const char* snapshot_path) {
  return guarded([&] {
    require(backend, "backend is required");
    nl2grid::service::SessionStore store(backend->config);
    std::optional<std::filesystem::path> snap;
    if (snapshot_path && *snapshot_path) snap = snapshot_path;
    nl2grid::service::serve(store, host && *host ? host : "127.0.0.1", port, snap);
    return NL2GRID_OK;
  });
}

}  // extern "C"
