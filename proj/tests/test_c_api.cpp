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


#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "nl2grid/nl2grid.h"

using json = nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  nl2grid_string_free(s);
  return out;
}

std::string fixture_path(const char* name) { return std::string(NL2GRID_TEST_DATA) + "/fixtures/" + name + ".csv"; }

struct Table {
  nl2grid_table* t = nullptr;
  ~Table() { nl2grid_table_free(t); }
};
struct Backend {
  nl2grid_backend* b = nullptr;
  ~Backend() { nl2grid_backend_free(b); }
};
struct Session {
  nl2grid_session* s = nullptr;
  ~Session() { nl2grid_session_free(s); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(nl2grid_version()) == "0.1.0");
  CHECK(std::string(nl2grid_status_name(NL2GRID_OK)) == "Ok");
  CHECK(std::string(nl2grid_status_name(NL2GRID_CSV_RAGGED_ROW)) == "CsvRaggedRow");
  CHECK(std::string(nl2grid_status_name(NL2GRID_INTERNAL)) == "Internal");
}

TEST_CASE("tables") {
  Table t;
  const std::string csv = "x,y\n1,a\n2,b\n";
  REQUIRE(nl2grid_table_parse_csv(csv.data(), csv.size(), &t.t) == NL2GRID_OK);
  CHECK(nl2grid_table_num_rows(t.t) == 2);
  CHECK(nl2grid_table_num_columns(t.t) == 2);
  char* out = nullptr;
  REQUIRE(nl2grid_table_to_csv(t.t, &out) == NL2GRID_OK);
  CHECK(take(out) == csv);
  REQUIRE(nl2grid_table_to_json(t.t, &out) == NL2GRID_OK);
  json j = json::parse(take(out));
  CHECK(j["rows"] == 2);
  CHECK(j["columns"][0]["type"] == "Number");

  Table bad;
  CHECK(nl2grid_table_parse_csv("a,b\n1\n", 6, &bad.t) == NL2GRID_CSV_RAGGED_ROW);
  CHECK(bad.t == nullptr);
  CHECK(std::string(nl2grid_last_error()).find("row 1 has 1 fields") != std::string::npos);
  CHECK(nl2grid_table_parse_csv(nullptr, 0, &bad.t) == NL2GRID_INVALID_ARGUMENT);
  CHECK(nl2grid_table_parse_csv(csv.data(), csv.size(), nullptr) == NL2GRID_INVALID_ARGUMENT);
  CHECK(nl2grid_table_load("/nonexistent.csv", &bad.t) == NL2GRID_IO_ERROR);

  nl2grid_table_free(t.t);
  REQUIRE(nl2grid_table_parse_csv(csv.data(), csv.size(), &t.t) == NL2GRID_OK);
  CHECK(std::string(nl2grid_last_error()).empty());
  CHECK(nl2grid_table_parse_csv("a,a\n1,2\n", 8, &bad.t) == NL2GRID_CSV_DUPLICATE_HEADER);
  CHECK(std::string(nl2grid_last_error()).find("a") != std::string::npos);
}

TEST_CASE("explain") {
  Table t;
  REQUIRE(nl2grid_table_load(fixture_path("astronauts").c_str(), &t.t) == NL2GRID_OK);
  char* out = nullptr;
  REQUIRE(nl2grid_explain("df['Mission Count'] = df['Missions'].str.count(',') + 1", t.t, 0, &out) == NL2GRID_OK);
  CHECK(take(out) == "(1) create column Mission Count, (2) count ',' from column Missions + 1");
  REQUIRE(nl2grid_explain("df['Missions'].str.count('STS')", t.t, 1, &out) == NL2GRID_OK);
  json j = json::parse(take(out));
  CHECK(j["steps"] == json::array({"select column Missions", "calculate count 'STS'"}));
  CHECK(j["tcr"].is_object());
  CHECK(nl2grid_explain("def f(row):\n  return 1", t.t, 0, &out) == NL2GRID_UNSUPPORTED_CONSTRUCT);
  CHECK(out == nullptr);
  CHECK(nl2grid_explain("df['Nope'].sum()", t.t, 0, &out) == NL2GRID_UNKNOWN_COLUMN);
}

TEST_CASE("prompt") {
  Table t;
  REQUIRE(nl2grid_table_parse_csv("x\n1\n", 4, &t.t) == NL2GRID_OK);
  char* out = nullptr;
  REQUIRE(nl2grid_prompt(t.t, "count rows", &out) == NL2GRID_OK);
  CHECK(take(out) == "# Python 3\nimport pandas as pd\ndf = pd.DataFrame({'x': [1]})\n# count rows\n");
  CHECK(nl2grid_prompt(t.t, "  ", &out) == NL2GRID_INVALID_ARGUMENT);
}

TEST_CASE("sessions") {
  Table t;
  Backend b;
  Session s;
  REQUIRE(nl2grid_table_load(fixture_path("astronauts").c_str(), &t.t) == NL2GRID_OK);
  REQUIRE(nl2grid_backend_mock(nullptr, &b.b) == NL2GRID_OK);
  REQUIRE(nl2grid_session_create(b.b, t.t, &s.s) == NL2GRID_OK);

  char* out = nullptr;
  REQUIRE(nl2grid_session_query(s.s, "calculate average mission length", 0, &out) == NL2GRID_OK);
  json v = json::parse(take(out));
  REQUIRE(v["steps"].size() == 2);

  std::vector<std::string> steps = {v["steps"][0], "column Space Flight (hr) divided by (count ',' from column Missions + 1)"};
  std::vector<const char*> ptrs = {steps[0].c_str(), steps[1].c_str()};
  REQUIRE(nl2grid_session_steps(s.s, ptrs.data(), ptrs.size(), 1, &out) == NL2GRID_OK);
  json u = json::parse(take(out));
  CHECK(u["output"]["columns"][0]["cells"][0] == 1653.5);
  CHECK(u.contains("code"));

  REQUIRE(nl2grid_session_query(s.s, "zzz", 0, &out) == NL2GRID_OK);
  CHECK(json::parse(take(out))["failure"] == "GenerationFailure");

  REQUIRE(nl2grid_session_info(s.s, &out) == NL2GRID_OK);
  CHECK(json::parse(take(out))["history"].size() == 3);
}

TEST_CASE("custom rules and backend errors") {
  Backend b;
  CHECK(nl2grid_backend_mock("not json", &b.b) == NL2GRID_INVALID_ARGUMENT);
  REQUIRE(nl2grid_backend_mock(R"([{"pattern": "one", "code": "1"}])", &b.b) == NL2GRID_OK);

  Backend h;
  CHECK(nl2grid_backend_http("", "m", "t", &h.b) == NL2GRID_INVALID_ARGUMENT);
  REQUIRE(nl2grid_backend_http("http://127.0.0.1:1/v1/completions", nullptr, "t", &h.b) == NL2GRID_OK);
  Table t;
  REQUIRE(nl2grid_table_parse_csv("x\n1\n", 4, &t.t) == NL2GRID_OK);
  Session s;
  REQUIRE(nl2grid_session_create(h.b, t.t, &s.s) == NL2GRID_OK);
  char* out = nullptr;
  CHECK(nl2grid_session_query(s.s, "anything", 0, &out) == NL2GRID_TRANSPORT_ERROR);
  REQUIRE(out != nullptr);
  CHECK(json::parse(take(out))["backend_error"] == true);
}

TEST_CASE("bench over a missing corpus") {
  Backend b;
  REQUIRE(nl2grid_backend_mock(nullptr, &b.b) == NL2GRID_OK);
  char* text = nullptr;
  CHECK(nl2grid_bench_run("/nonexistent/corpus", b.b, 1, "x", &text, nullptr) == NL2GRID_IO_ERROR);
  CHECK(text == nullptr);
}
