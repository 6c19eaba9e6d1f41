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


#include <filesystem>
#include <thread>

#include "doctest.h"
#include "fake_endpoint.hpp"
#include "nl2grid/service.hpp"
#include "support.hpp"

using namespace nl2grid;
using namespace nl2grid::service;
using testsupport::error_code_of;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* const kStep2Fix = "column Space Flight (hr) divided by (count ',' from column Missions + 1)";

// Runs an HttpServer over a store on a loopback port for the test's lifetime.
struct LiveServer {
  SessionStore& store;
  HttpServer server;
  int port = 0;
  std::thread thread;

  explicit LiveServer(SessionStore& s) : store(s), server(s) {
    port = server.bind("127.0.0.1", 0);
    thread = std::thread([this] { server.listen(); });
    httplib::Client probe("127.0.0.1", port);
    for (int i = 0; i < 200 && !probe.Get("/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

std::string astro_csv() { return testsupport::read_file(testsupport::data_path("fixtures/astronauts.csv")); }

}  // namespace

TEST_CASE("mission length question, then Update & Go with the comma fix") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string id = store.create(testsupport::astronauts());

  ResultView first = store.query(id, "calculate average mission length");
  CHECK(!first.failure);
  CHECK(first.message.empty());
  REQUIRE(first.output);
  CHECK(first.output->placement == interp::Placement::AppendToGrid);
  CHECK(first.output->created_column_names == std::vector<std::string>{"Mission Length"});
  REQUIRE(first.steps);
  CHECK(*first.steps == std::vector<std::string>{
                            "create column Mission Length",
                            "column Space Flight (hr) divided by count 'STS' from column Missions"});
  REQUIRE(first.table.find("Mission Length"));
  CHECK(first.table.find("Mission Length")->cells[0] == Value::number(3307));
  CHECK(!first.code);

  std::vector<std::string> edited = *first.steps;
  edited[1] = kStep2Fix;
  ResultView second = store.update_and_go(id, edited);
  CHECK(second.query_echo == "(1) create column Mission Length, (2) " + std::string(kStep2Fix));
  CHECK(!second.failure);
  REQUIRE(second.output);
  const Column* fixed = second.table.find("Mission Length");
  REQUIRE(fixed);
  CHECK(fixed->cells[0] == Value::number(1653.5));
  CHECK(second.table.num_columns() == testsupport::astronauts().num_columns() + 1);
  REQUIRE(second.steps);
  CHECK(second.steps->at(1) == kStep2Fix);

  SessionInfo info = store.get(id);
  REQUIRE(info.history.size() == 2);
  CHECK(info.history[0].kind == "query");
  CHECK(info.history[1].kind == "steps");
  CHECK(info.history[1].steps == edited);
  CHECK(info.original == testsupport::astronauts());
}

TEST_CASE("validation failures are reported and recorded") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string id = store.create(testsupport::astronauts());
  ResultView empty_steps = store.update_and_go(id, {"", "  "});
  CHECK(empty_steps.error_code == ErrorCode::InvalidArgument);
  CHECK(!empty_steps.message.empty());
  ResultView blank = store.query(id, "   ");
  CHECK(blank.error_code == ErrorCode::InvalidArgument);
  CHECK(store.get(id).history.size() == 2);
  CHECK(store.get(id).working == testsupport::astronauts());
  CHECK(error_code_of([&] { store.query("nope", "x"); }) == ErrorCode::NotFound);
  CHECK(error_code_of([&] { store.remove("nope"); }) == ErrorCode::NotFound);
}

TEST_CASE("failure modes surface in the view") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string id = store.create(testsupport::astronauts());

  ResultView none = store.query(id, "zzz");
  CHECK(none.failure == bench::FailureMode::GenerationFailure);
  CHECK(!none.output);
  CHECK(!none.message.empty());

  ResultView over = store.query(id, "create column showing how many missions");
  CHECK(over.failure == bench::FailureMode::OverwriteAttempt);
  CHECK(store.get(id).working == testsupport::astronauts());

  ResultView raw = store.query(id, "new column number of missions");
  CHECK(raw.failure == bench::FailureMode::RawDataOutput);
  CHECK(raw.output.has_value());
  CHECK(!raw.steps);
  CHECK(raw.error_code == ErrorCode::ExplanationUnavailable);

  ResultView def = store.query(id, "return 3 columns for if year built >= 1970, basement > 0, renovated > 0", true);
  CHECK(def.failure == bench::FailureMode::ExecutionFailure);
  CHECK(def.error_code == ErrorCode::UnsupportedConstruct);
  CHECK(!def.steps);
  REQUIRE(def.code);
  CHECK(def.code->rfind("def get_features(df):", 0) == 0);

  CHECK(store.get(id).history.size() == 4);
}

TEST_CASE("sessions are isolated") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string a = store.create(testsupport::astronauts());
  std::string b = store.create(testsupport::astronauts());
  CHECK(a != b);
  CHECK(a.size() == 16);
  store.query(a, "calculate average mission length");
  CHECK(store.get(a).working.find("Mission Length"));
  CHECK(!store.get(b).working.find("Mission Length"));
  CHECK(store.get(b).history.empty());
  store.remove(a);
  CHECK(store.ids() == std::vector<std::string>{b});
}

TEST_CASE("concurrent requests on many sessions") {
  SessionStore store(codegen::BackendConfig::mock());
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(store.create(testsupport::astronauts()));
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&, t] {
      for (int i = 0; i < 5; ++i) {
        store.query(ids[static_cast<std::size_t>((t + i) % 8)], "calculate average mission length");
        store.query(ids[static_cast<std::size_t>(t)], "how many rows");
      }
    });
  for (auto& th : pool) th.join();
  std::size_t total = 0;
  for (const auto& id : ids) total += store.get(id).history.size();
  CHECK(total == 80);
}

TEST_CASE("replaying steps is idempotent") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string id = store.create(testsupport::astronauts());
  ResultView first = store.query(id, "calculate average mission length");
  ResultView again = store.update_and_go(id, *first.steps);
  ResultView third = store.update_and_go(id, *again.steps);
  CHECK(*again.steps == *first.steps);
  CHECK(*third.steps == *first.steps);
  CHECK(again.table == first.table);
  CHECK(third.table == first.table);
}

TEST_CASE("backend outages are flagged") {
  testsupport::FakeEndpoint ep([](int, const httplib::Request&, httplib::Response& res) { res.status = 503; });
  auto cfg = ep.config();
  cfg.max_attempts = 2;
  SessionStore store(cfg);
  std::string id = store.create(testsupport::astronauts());
  ResultView v = store.query(id, "calculate average mission length");
  CHECK(v.backend_error);
  CHECK(v.error_code == ErrorCode::TransportError);
  CHECK(!v.failure);
  CHECK(store.get(id).history.size() == 1);
}

TEST_CASE("snapshot round trip") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string id = store.create(testsupport::astronauts());
  store.query(id, "calculate average mission length");
  store.query(id, "zzz");

  fs::path file = fs::temp_directory_path() / ("nl2grid_snapshot_" + std::to_string(std::random_device{}()) + ".json");
  store.save(file);
  SessionStore restored(codegen::BackendConfig::mock());
  restored.load(file);
  fs::remove(file);

  SessionInfo a = store.get(id), b = restored.get(id);
  CHECK(b.original == a.original);
  CHECK(b.working == a.working);
  REQUIRE(b.history.size() == a.history.size());
  CHECK(b.history[0].query == a.history[0].query);
  CHECK(b.history[0].steps == a.history[0].steps);
  CHECK(b.history[1].failure == bench::FailureMode::GenerationFailure);
  CHECK(restored.snapshot_json() == store.snapshot_json());
  CHECK(error_code_of([&] { restored.load("/nonexistent/dir/snap.json"); }) == ErrorCode::IoError);
}

TEST_CASE("result JSON") {
  SessionStore store(codegen::BackendConfig::mock());
  std::string id = store.create(testsupport::astronauts());
  json j = json::parse(result_view_json(store.query(id, "calculate average mission length", true)));
  CHECK(j["query_echo"] == "calculate average mission length");
  CHECK(j["output"]["shape"] == "NewColumns");
  CHECK(j["output"]["placement"] == "AppendToGrid");
  CHECK(j["output"]["created_columns"] == json::array({"Mission Length"}));
  CHECK(j["steps"].size() == 2);
  CHECK(j["failure"].is_null());
  CHECK(j["backend_error"] == false);
  CHECK(j.contains("code"));
  CHECK(j["table"]["rows"] == 23);

  json v = json::parse(result_view_json(store.query(id, "how many rows")));
  CHECK(v["output"]["shape"] == "SingleValue");
  CHECK(v["output"]["value"] == 23);
  CHECK(!v.contains("code"));
}

TEST_CASE("HTTP API") {
  SessionStore store(codegen::BackendConfig::mock());
  LiveServer live(store);
  auto cli = live.client();

  auto health = cli.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto created = cli.Post("/sessions", astro_csv(), "text/csv");
  REQUIRE(created);
  CHECK(created->status == 201);
  json c = json::parse(created->body);
  std::string id = c["id"];
  CHECK(c["schema"].size() == 9);
  CHECK(c["schema"][5]["name"] == "Space Flight (hr)");

  auto q = cli.Post("/sessions/" + id + "/query", json{{"query", "calculate average mission length"}}.dump(),
                    "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  json qv = json::parse(q->body);
  CHECK(qv["steps"][0] == "create column Mission Length");

  json steps = qv["steps"];
  steps[1] = kStep2Fix;
  auto u = cli.Post("/sessions/" + id + "/steps?debug=1", json{{"steps", steps}}.dump(), "application/json");
  REQUIRE(u);
  CHECK(u->status == 200);
  json uv = json::parse(u->body);
  CHECK(uv["query_echo"] == "(1) create column Mission Length, (2) " + std::string(kStep2Fix));
  CHECK(uv["code"] == "df['Mission Length'] = df['Space Flight (hr)'] / (df['Missions'].str.count(',') + 1)");
  CHECK(uv["output"]["columns"][0]["cells"][0] == 1653.5);

  auto bad = cli.Post("/sessions/" + id + "/steps", json{{"steps", json::array({""})}}.dump(), "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto notjson = cli.Post("/sessions/" + id + "/query", "nope", "application/json");
  REQUIRE(notjson);
  CHECK(notjson->status == 400);

  auto got = cli.Get("/sessions/" + id);
  REQUIRE(got);
  json sv = json::parse(got->body);
  CHECK(sv["history"].size() == 3);
  CHECK(sv["original_columns"].size() == 9);

  auto missing = cli.Get("/sessions/ffffffffffffffff");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"]["code"] == "NotFound");

  auto ragged = cli.Post("/sessions", "a,b\n1\n", "text/csv");
  REQUIRE(ragged);
  CHECK(ragged->status == 400);
  CHECK(json::parse(ragged->body)["error"]["code"] == "CsvRaggedRow");

  auto via_json = cli.Post("/sessions", json{{"csv", "x\n1\n"}}.dump(), "application/json");
  REQUIRE(via_json);
  CHECK(via_json->status == 201);

  httplib::MultipartFormDataItems items = {{"file", "x,y\n1,2\n", "t.csv", "text/csv"}};
  auto multipart = cli.Post("/sessions", items);
  REQUIRE(multipart);
  CHECK(multipart->status == 201);

  auto opts = cli.Options("/sessions");
  REQUIRE(opts);
  CHECK(opts->status == 204);

  auto del = cli.Delete("/sessions/" + id);
  REQUIRE(del);
  CHECK(del->status == 204);
  CHECK(cli.Get("/sessions/" + id)->status == 404);
}

TEST_CASE("HTTP API reports backend outages as 502") {
  testsupport::FakeEndpoint ep([](int, const httplib::Request&, httplib::Response& res) { res.status = 401; });
  SessionStore store(ep.config());
  LiveServer live(store);
  auto cli = live.client();
  std::string id = json::parse(cli.Post("/sessions", astro_csv(), "text/csv")->body)["id"];
  auto q = cli.Post("/sessions/" + id + "/query", json{{"query", "anything"}}.dump(), "application/json");
  REQUIRE(q);
  CHECK(q->status == 502);
  json v = json::parse(q->body);
  CHECK(v["backend_error"] == true);
  CHECK(v["error"]["code"] == "AuthError");
}
