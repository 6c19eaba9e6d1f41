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


#include "nl2grid/service.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json_io.hpp"
#include "nl2grid/tcr.hpp"
#include "nl2grid/utterance.hpp"

namespace nl2grid::service {

namespace {

using json = nlohmann::json;
using bench::FailureMode;

std::string new_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

bool has_literal_list(const tcr::Expr& e) {
  if (e.kind == tcr::Kind::LiteralList) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_literal_list);
}

std::string failure_message(FailureMode m, const std::string& detail) {
  switch (m) {
    case FailureMode::GenerationFailure: return "No code was generated for this query. Try rephrasing it.";
    case FailureMode::ExecutionFailure: return "The generated code could not be run: " + detail;
    case FailureMode::OutputTypeFailure: return "The result cannot be shown in the grid: " + detail;
    case FailureMode::RawDataOutput:
      return "The model wrote the values out directly instead of computing them; they may be wrong.";
    case FailureMode::OverwriteAttempt: return "The generated code tried to change an original column: " + detail;
    case FailureMode::OutputMismatch: return "The result does not match the expected output.";
    case FailureMode::Success: return {};
  }
  return detail;
}

json history_to_json(const HistoryEntry& h) {
  return {{"kind", h.kind},
          {"query", h.query},
          {"completion", h.completion ? json(*h.completion) : json(nullptr)},
          {"steps", h.steps ? json(*h.steps) : json(nullptr)},
          {"output", h.output ? io::eval_to_json(*h.output) : json(nullptr)},
          {"failure", h.failure ? json(std::string(bench::to_string(*h.failure))) : json(nullptr)},
          {"message", h.message}};
}

HistoryEntry history_from_json(const json& j) {
  HistoryEntry h;
  h.kind = j.at("kind").get<std::string>();
  h.query = j.at("query").get<std::string>();
  if (j.contains("completion") && !j["completion"].is_null()) h.completion = j["completion"].get<std::string>();
  if (j.contains("steps") && !j["steps"].is_null()) h.steps = j["steps"].get<std::vector<std::string>>();
  if (j.contains("output") && !j["output"].is_null()) h.output = io::eval_from_json(j["output"]);
  if (j.contains("failure") && !j["failure"].is_null())
    h.failure = bench::failure_mode_from_string(j["failure"].get<std::string>());
  h.message = j.value("message", std::string());
  return h;
}

}  // namespace

struct SessionStore::Session {
  std::string id;
  Table original;
  Table working;
  std::vector<HistoryEntry> history;
  mutable std::mutex mu;

  Session(std::string i, Table t) : id(std::move(i)), original(t), working(std::move(t)) {}
};

SessionStore::SessionStore(codegen::BackendConfig backend) : backend_(std::move(backend)) { backend_.validate(); }
SessionStore::~SessionStore() = default;

std::string SessionStore::create(Table table) {
  std::string id = new_id();
  auto s = std::make_shared<Session>(id, std::move(table));
  std::lock_guard lock(mu_);
  sessions_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

ResultView SessionStore::query(const std::string& id, const std::string& query, bool debug) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return run(*s, "query", query, std::nullopt, debug);
}

ResultView SessionStore::update_and_go(const std::string& id, const std::vector<std::string>& steps, bool debug) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (std::all_of(steps.begin(), steps.end(), is_blank)) {
    ResultView v(s->working);
    v.error_code = ErrorCode::InvalidArgument;
    v.message = "Add at least one step before pressing Update & Go.";
    s->history.push_back({"steps", "", std::nullopt, steps, std::nullopt, std::nullopt, v.message});
    return v;
  }
  return run(*s, "steps", utterance::concat_steps(steps), steps, debug);
}

ResultView SessionStore::run(Session& s, const std::string& kind, const std::string& query,
                             std::optional<std::vector<std::string>> submitted_steps, bool debug) {
  ResultView v(s.working);
  v.query_echo = query;
  HistoryEntry h;
  h.kind = kind;
  h.query = query;
  h.steps = std::move(submitted_steps);

  auto fail = [&](FailureMode m, std::optional<ErrorCode> code, const std::string& detail) {
    v.failure = m;
    v.error_code = code;
    v.message = failure_message(m, detail);
  };

  [&] {
    if (is_blank(query)) {
      v.error_code = ErrorCode::InvalidArgument;
      v.message = "Type a query first.";
      return;
    }
    codegen::Completion c;
    try {
      c = codegen::generate(backend_, codegen::build_prompt(s.working, query));
    } catch (const Error& e) {
      v.backend_error = e.code() == ErrorCode::TransportError || e.code() == ErrorCode::AuthError;
      v.error_code = e.code();
      v.message = std::string("The code generator is unavailable: ") + e.what();
      return;
    }
    h.completion = c.text;
    if (debug) v.code = c.text;
    if (is_blank(c.text)) return fail(FailureMode::GenerationFailure, std::nullopt, "");

    tcr::Program program;
    try {
      program = tcr::translate_source(c.text, tcr::Schema::from_table(s.working));
      v.output = interp::evaluate(program, s.working, s.original.column_names());
    } catch (const Error& e) {
      FailureMode m = e.code() == ErrorCode::OverwriteRefused      ? FailureMode::OverwriteAttempt
                      : e.code() == ErrorCode::UndisplayableOutput ? FailureMode::OutputTypeFailure
                                                                   : FailureMode::ExecutionFailure;
      return fail(m, e.code(), e.what());
    }
    try {
      v.steps = utterance::generate_utterance(program).texts();
    } catch (const Error& e) {
      v.error_code = e.code();
    }
    bool raw = std::any_of(program.statements.begin(), program.statements.end(),
                           [](const tcr::Statement& st) { return has_literal_list(st.expr); });
    if (raw) fail(FailureMode::RawDataOutput, v.error_code, "");
    if (v.output->placement == interp::Placement::AppendToGrid) s.working = interp::apply_output(s.working, *v.output);
    v.table = s.working;
  }();

  h.output = v.output;
  h.failure = v.failure;
  h.message = v.message;
  s.history.push_back(std::move(h));
  return v;
}

SessionInfo SessionStore::get(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return {s->id, s->original, s->working, s->history};
}

void SessionStore::remove(const std::string& id) {
  std::lock_guard lock(mu_);
  if (sessions_.erase(id) == 0) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::string SessionStore::snapshot_json() const {
  json arr = json::array();
  for (const auto& id : ids()) {
    std::optional<SessionInfo> found;
    try {
      found = get(id);
    } catch (const Error&) {
      continue;  // removed meanwhile
    }
    const SessionInfo& info = *found;
    json hist = json::array();
    for (const auto& h : info.history) hist.push_back(history_to_json(h));
    arr.push_back({{"id", info.id},
                   {"original", io::table_to_json(info.original)},
                   {"working", io::table_to_json(info.working)},
                   {"history", hist}});
  }
  return json{{"schema_version", 1}, {"sessions", arr}}.dump(2);
}

void SessionStore::restore_json(const std::string& text) {
  try {
    json doc = json::parse(text);
    for (const auto& sj : doc.at("sessions")) {
      auto s = std::make_shared<Session>(sj.at("id").get<std::string>(), io::table_from_json(sj.at("original")));
      s->working = io::table_from_json(sj.at("working"));
      for (const auto& hj : sj.at("history")) s->history.push_back(history_from_json(hj));
      std::lock_guard lock(mu_);
      sessions_[s->id] = std::move(s);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad snapshot: ") + e.what());
  }
}

void SessionStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << snapshot_json();
}

void SessionStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  restore_json(ss.str());
}

std::string result_view_json(const ResultView& v, int indent) {
  json out = {{"query_echo", v.query_echo},
              {"output", v.output ? io::eval_to_json(*v.output) : json(nullptr)},
              {"error", nullptr},
              {"steps", v.steps ? json(*v.steps) : json(nullptr)},
              {"failure", v.failure ? json(std::string(bench::to_string(*v.failure))) : json(nullptr)},
              {"message", v.message},
              {"backend_error", v.backend_error},
              {"table", io::table_to_json(v.table)}};
  if (v.error_code) out["error"] = {{"code", std::string(to_string(*v.error_code))}, {"message", v.message}};
  if (v.code) out["code"] = *v.code;
  return out.dump(indent);
}

std::string session_json(const SessionInfo& s, int indent) {
  json hist = json::array();
  for (const auto& h : s.history) hist.push_back(history_to_json(h));
  return json{{"id", s.id},
              {"original_columns", s.original.column_names()},
              {"table", io::table_to_json(s.working)},
              {"history", hist}}
      .dump(indent);
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

json schema_json(const Table& t) {
  json arr = json::array();
  for (const auto& c : t.columns()) arr.push_back({{"name", c.name}, {"type", to_string(c.type)}});
  return arr;
}

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, json{{"error", {{"code", std::string(code)}, {"message", message}}}}.dump());
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::TransportError:
    case ErrorCode::AuthError: return 502;
    case ErrorCode::IoError: return 500;
    default: return 400;
  }
}

std::string upload_text(const httplib::Request& req) {
  if (req.is_multipart_form_data()) {
    if (req.has_file("file")) return req.get_file_value("file").content;
    if (!req.files.empty()) return req.files.begin()->second.content;
    throw Error(ErrorCode::InvalidArgument, "multipart upload carries no file");
  }
  if (req.get_header_value("Content-Type").starts_with("application/json")) {
    json body = json::parse(req.body);
    if (!body.contains("csv") || !body["csv"].is_string()) throw Error(ErrorCode::InvalidArgument, "body needs csv");
    return body["csv"].get<std::string>();
  }
  return req.body;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, "request body is not JSON");
  }
}

bool debug_flag(const httplib::Request& req) {
  if (!req.has_param("debug")) return false;
  std::string v = req.get_param_value("debug");
  return v.empty() || v == "1" || v == "true";
}

void send_view(httplib::Response& res, const ResultView& v) {
  int status = 200;
  if (v.backend_error) status = 502;
  else if (v.error_code == ErrorCode::InvalidArgument && !v.failure && !v.output) status = 400;
  send_json(res, status, result_view_json(v));
}

}  // namespace

struct HttpServer::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), to_string(e.code()), e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "InvalidArgument", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    });
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, R"({"status":"ok"})");
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      Table t = parse_csv(upload_text(req));
      std::string id = store.create(t);
      send_json(res, 201, json{{"id", id}, {"schema", schema_json(t)}, {"table", io::table_to_json(t)}}.dump());
    });

    server.Post(R"(/sessions/([^/]+)/query)", [this](const httplib::Request& req, httplib::Response& res) {
      json body = parse_body(req);
      if (!body.contains("query") || !body["query"].is_string())
        throw Error(ErrorCode::InvalidArgument, "body needs a query string");
      send_view(res, store.query(req.matches[1], body["query"].get<std::string>(), debug_flag(req)));
    });

    server.Post(R"(/sessions/([^/]+)/steps)", [this](const httplib::Request& req, httplib::Response& res) {
      json body = parse_body(req);
      if (!body.contains("steps") || !body["steps"].is_array())
        throw Error(ErrorCode::InvalidArgument, "body needs a steps array");
      std::vector<std::string> steps;
      for (const auto& s : body["steps"]) {
        if (!s.is_string()) throw Error(ErrorCode::InvalidArgument, "steps must be strings");
        steps.push_back(s.get<std::string>());
      }
      send_view(res, store.update_and_go(req.matches[1], steps, debug_flag(req)));
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, session_json(store.get(req.matches[1])));
    });

    server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      store.remove(req.matches[1]);
      res.status = 204;
    });
  }
};

HttpServer::HttpServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

namespace {
std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }
}  // namespace

void serve(SessionStore& store, const std::string& host, int port,
           const std::optional<std::filesystem::path>& snapshot) {
  if (snapshot && std::filesystem::exists(*snapshot)) store.load(*snapshot);
  HttpServer server(store);
  int bound = server.bind(host, port);
  std::fprintf(stderr, "nl2grid: listening on http://%s:%d\n", host.c_str(), bound);

  g_stop = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      if (g_stop) {
        server.stop();
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  server.listen();
  done = true;
  watcher.join();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  if (snapshot) {
    store.save(*snapshot);
    std::fprintf(stderr, "nl2grid: saved %zu session(s) to %s\n", store.ids().size(), snapshot->string().c_str());
  }
}

}  // namespace nl2grid::service
