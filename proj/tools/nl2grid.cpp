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


// nl2grid command line: serve, ask, explain and bench over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nl2grid/nl2grid.h"

namespace {

using json = nlohmann::json;

struct Owned {
  char* p = nullptr;
  ~Owned() { nl2grid_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int fail(nl2grid_status st) {
  std::cerr << "nl2grid: " << nl2grid_status_name(st) << ": " << nl2grid_last_error() << "\n";
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct BackendOpts {
  std::string kind = "mock";
  std::string rules;

  void add(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "mock or http (http reads NL2GRID_API_URL and NL2GRID_API_KEY)")
        ->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--rules", rules, "mock rules file (JSON array of {pattern, code})")->check(CLI::ExistingFile);
  }

  nl2grid_status make(nl2grid_backend** out) const {
    if (kind == "http") return nl2grid_backend_http_from_env(out);
    std::string text = rules.empty() ? std::string() : read_file(rules);
    return nl2grid_backend_mock(rules.empty() ? nullptr : text.c_str(), out);
  }
};

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "TRUE" : "FALSE";
  if (v.is_object() && v.contains("date")) return v["date"].get<std::string>();
  if (v.is_number()) {
    std::ostringstream ss;
    ss << v.get<double>();
    return ss.str();
  }
  return v.dump();
}

void print_columns(const json& cols) {
  if (cols.empty()) return;
  std::size_t rows = cols[0]["cells"].size();
  std::string line;
  for (std::size_t c = 0; c < cols.size(); ++c) line += (c ? " | " : "") + cols[c]["name"].get<std::string>();
  std::cout << line << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < cols.size(); ++c) line += (c ? " | " : "") + cell_text(cols[c]["cells"][r]);
    std::cout << line << "\n";
  }
}

void print_view(const json& v) {
  std::cout << "query: " << v["query_echo"].get<std::string>() << "\n";
  if (v.contains("code")) std::cout << "code:\n" << v["code"].get<std::string>() << "\n";
  if (!v["output"].is_null()) {
    const json& out = v["output"];
    std::string shape = out["shape"].get<std::string>();
    std::cout << "result (" << shape << "):\n";
    if (shape == "SingleValue") std::cout << cell_text(out["value"]) << "\n";
    else if (out.contains("columns")) print_columns(out["columns"]);
    else print_columns(out["table"]["columns"]);
  }
  if (!v["steps"].is_null()) {
    std::cout << "steps:\n";
    int i = 1;
    for (const auto& s : v["steps"]) std::cout << "  (" << i++ << ") " << s.get<std::string>() << "\n";
  }
  if (!v["failure"].is_null()) std::cout << "failure: " << v["failure"].get<std::string>() << "\n";
  if (!v["message"].get<std::string>().empty()) std::cout << "message: " << v["message"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language table computations with grounded, editable steps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nl2grid_version());

  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  BackendOpts serve_backend;
  serve_backend.add(serve);
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string snapshot;
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "address to bind");
  serve->add_option("--snapshot", snapshot, "session snapshot file, loaded at start and written on shutdown");

  auto* ask = app.add_subcommand("ask", "Run one query against a CSV table");
  BackendOpts ask_backend;
  ask_backend.add(ask);
  std::string ask_table, query;
  bool ask_json = false, debug = false, show_prompt = false;
  ask->add_option("--table", ask_table, "CSV file")->required()->check(CLI::ExistingFile);
  ask->add_option("--query", query, "the query text")->required();
  ask->add_flag("--json", ask_json, "print the result view as JSON");
  ask->add_flag("--debug", debug, "include the generated code");
  ask->add_flag("--prompt", show_prompt, "print the prompt and exit");

  auto* explain = app.add_subcommand("explain", "Print the grounded steps of a code snippet");
  std::string code_file, explain_table;
  bool explain_json = false;
  explain->add_option("--code", code_file, "snippet file")->required()->check(CLI::ExistingFile);
  explain->add_option("--table", explain_table, "CSV file")->required()->check(CLI::ExistingFile);
  explain->add_flag("--json", explain_json, "print steps and the typed tree as JSON");

  auto* bench = app.add_subcommand("bench", "Run the round-trip benchmark over a corpus");
  BackendOpts bench_backend;
  bench_backend.add(bench);
  std::string corpus, json_out, label = "corpus";
  unsigned workers = 1;
  double min_output = -1, min_code = -1;
  bench->add_option("--corpus", corpus, "corpus directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--workers", workers, "worker threads (0 = all cores)");
  bench->add_option("--json", json_out, "write the JSON report here");
  bench->add_option("--label", label, "dataset label in the table");
  bench->add_option("--min-output-equivalence", min_output, "exit 1 below this percentage");
  bench->add_option("--min-code-equality", min_code, "exit 1 below this normalized percentage");

  CLI11_PARSE(app, argc, argv);

  auto with_backend = [](const BackendOpts& o, auto&& body) -> int {
    nl2grid_backend* b = nullptr;
    if (auto st = o.make(&b); st != NL2GRID_OK) return fail(st);
    int rc = body(b);
    nl2grid_backend_free(b);
    return rc;
  };
  auto with_table = [](const std::string& path, auto&& body) -> int {
    nl2grid_table* t = nullptr;
    if (auto st = nl2grid_table_load(path.c_str(), &t); st != NL2GRID_OK) return fail(st);
    int rc = body(t);
    nl2grid_table_free(t);
    return rc;
  };

  try {
    if (*serve) {
      return with_backend(serve_backend, [&](nl2grid_backend* b) {
        auto st = nl2grid_serve(b, host.c_str(), port, snapshot.empty() ? nullptr : snapshot.c_str());
        return st == NL2GRID_OK ? 0 : fail(st);
      });
    }

    if (*ask) {
      return with_table(ask_table, [&](nl2grid_table* t) {
        if (show_prompt) {
          Owned p;
          if (auto st = nl2grid_prompt(t, query.c_str(), &p.p); st != NL2GRID_OK) return fail(st);
          std::cout << p.str();
          return 0;
        }
        return with_backend(ask_backend, [&](nl2grid_backend* b) {
          nl2grid_session* s = nullptr;
          if (auto st = nl2grid_session_create(b, t, &s); st != NL2GRID_OK) return fail(st);
          Owned out;
          auto st = nl2grid_session_query(s, query.c_str(), debug ? 1 : 0, &out.p);
          nl2grid_session_free(s);
          if (!out.p) return fail(st);
          if (ask_json) std::cout << out.str() << "\n";
          else print_view(json::parse(out.str()));
          if (st != NL2GRID_OK) return fail(st);
          return json::parse(out.str())["failure"].is_null() ? 0 : 2;
        });
      });
    }

    if (*explain) {
      std::string code = read_file(code_file);
      return with_table(explain_table, [&](nl2grid_table* t) {
        Owned out;
        if (auto st = nl2grid_explain(code.c_str(), t, explain_json ? 1 : 0, &out.p); st != NL2GRID_OK)
          return fail(st);
        std::cout << out.str() << "\n";
        return 0;
      });
    }

    if (*bench) {
      return with_backend(bench_backend, [&](nl2grid_backend* b) {
        Owned text, js;
        auto st = nl2grid_bench_run(corpus.c_str(), b, workers, label.c_str(), &text.p, &js.p);
        if (st != NL2GRID_OK) return fail(st);
        std::cout << text.str();
        if (!json_out.empty()) {
          std::ofstream f(json_out, std::ios::binary | std::ios::trunc);
          if (!f) {
            std::cerr << "nl2grid: cannot write " << json_out << "\n";
            return 1;
          }
          f << js.str() << "\n";
        }
        json report = json::parse(js.str());
        auto below = [](const json& v, double min) { return min >= 0 && (v.is_null() || v.get<double>() < min); };
        if (below(report["output_equivalence"], min_output) ||
            below(report["code_generation_equality"]["normalized"], min_code)) {
          std::cerr << "nl2grid: benchmark below the required threshold\n";
          return 1;
        }
        return 0;
      });
    }
  } catch (const std::exception& e) {
    std::cerr << "nl2grid: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
