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


// Sessions around an uploaded table: a query produces a result and its
// grounded steps; edited steps are joined into a new query and re-run.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nl2grid/bench.hpp"
#include "nl2grid/codegen.hpp"
#include "nl2grid/interp.hpp"
#include "nl2grid/table.hpp"

namespace nl2grid::service {

struct ResultView {
  explicit ResultView(Table working) : table(std::move(working)) {}

  std::string query_echo;
  std::optional<interp::EvalOutput> output;
  std::optional<ErrorCode> error_code;
  std::string message;  // user-readable; empty on success
  std::optional<std::vector<std::string>> steps;
  std::optional<bench::FailureMode> failure;  // unset on success
  bool backend_error = false;                 // transport or auth, not a model failure
  std::optional<std::string> code;            // only with debug
  Table table;                                // working table after the request
};

struct HistoryEntry {
  std::string kind;  // "query" or "steps"
  std::string query;
  std::optional<std::string> completion;
  std::optional<std::vector<std::string>> steps;
  std::optional<interp::EvalOutput> output;
  std::optional<bench::FailureMode> failure;
  std::string message;
};

struct SessionInfo {
  std::string id;
  Table original;
  Table working;
  std::vector<HistoryEntry> history;
};

/// In-memory sessions. Safe for concurrent use; requests on one session are
/// serialized.
class SessionStore {
 public:
  explicit SessionStore(codegen::BackendConfig backend);
  ~SessionStore();

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  /// Returns the new session id.
  std::string create(Table table);

  /// Throws Error(NotFound) for an unknown id; other failures are reported in
  /// the view and recorded in the history.
  ResultView query(const std::string& id, const std::string& query, bool debug = false);
  ResultView update_and_go(const std::string& id, const std::vector<std::string>& steps, bool debug = false);

  SessionInfo get(const std::string& id) const;
  /// Throws Error(NotFound).
  void remove(const std::string& id);
  std::vector<std::string> ids() const;

  std::string snapshot_json() const;
  /// Replaces nothing; sessions from the snapshot are added.
  void restore_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  ResultView run(Session& s, const std::string& kind, const std::string& query,
                 std::optional<std::vector<std::string>> submitted_steps, bool debug);

  codegen::BackendConfig backend_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

std::string result_view_json(const ResultView& v, int indent = -1);
std::string session_json(const SessionInfo& s, int indent = -1);

/// HTTP front end for a store.
class HttpServer {
 public:
  explicit HttpServer(SessionStore& store);
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns the bound port or throws
  /// Error(IoError).
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs a server until SIGINT or SIGTERM, then writes the snapshot if a path
/// is given.
void serve(SessionStore& store, const std::string& host, int port,
           const std::optional<std::filesystem::path>& snapshot = std::nullopt);

}  // namespace nl2grid::service
