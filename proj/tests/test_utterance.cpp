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


#include "doctest.h"
#include "nl2grid/utterance.hpp"
#include "goldens.hpp"
#include "support.hpp"

using namespace nl2grid;
using namespace nl2grid::utterance;
using testsupport::error_code_of;
using testsupport::goldens;

namespace {

tcr::Program program_of(const char* fixture, std::string_view code) {
  return tcr::translate_source(code, testsupport::schema_of(testsupport::fixture(fixture)));
}

}  // namespace

TEST_CASE("golden utterances") {
  REQUIRE(goldens().size() >= 8);
  for (const auto& g : goldens()) {
    CAPTURE(std::string(g.code));
    std::string got = generate_utterance(program_of(g.fixture, g.code)).text();
    CHECK_MESSAGE(utterances_match(got, g.utterance), got);
  }
}

TEST_CASE("golden utterance over a previously created column") {
  tcr::Schema s = testsupport::schema_of(testsupport::astronauts());
  s.set("Mission Count", {CellType::Number, false});
  auto p = tcr::translate_source("df['Hours per Mission'] = df['Space Flight (hr)'] / df['Mission Count']", s);
  CHECK(utterances_match(generate_utterance(p).text(),
                         "(1) create column Hours per Mission, (2) column Space Flight (hr) divided by column "
                         "Mission Count."));
}

TEST_CASE("golden utterances parse back to the same program") {
  for (const auto& g : goldens()) {
    CAPTURE(std::string(g.code));
    tcr::Schema s = testsupport::schema_of(testsupport::fixture(g.fixture));
    tcr::Program want = tcr::inline_bindings(tcr::translate_source(g.code, s));
    CHECK(parse_grounded(split_steps(g.utterance), s) == want);
  }
}

TEST_CASE("normalization") {
  CHECK(normalize_step("count ‘,’ from column Missions + 1.") == "count , from column Missions + 1");
  CHECK(normalize_step("  select   column \"Missions\"  ") == "select column Missions");
  CHECK(normalize_step("count.") == "count");
  CHECK(utterances_match("(1) a, (2) b.", "(1) a, (2) b"));
  CHECK_FALSE(utterances_match("(1) a, (2) b", "(1) a"));
}

TEST_CASE("step-count law for chains") {
  tcr::Schema s = testsupport::schema_of(testsupport::astronauts());
  struct Case {
    const char* code;
    std::size_t ops;
  };
  for (const Case& c : std::vector<Case>{
           {"df['n'] = df['Missions'].str.count('STS')", 2},
           {"df['n'] = df['Missions'].str.split(',').str.len()", 3},
           {"df['n'] = df['Missions'].str.lower().str.strip().str.split(' ').str.len()", 5},
           {"df['n'] = df['Name']", 1},
       }) {
    CAPTURE(std::string(c.code));
    CHECK(generate_utterance(tcr::translate_source(c.code, s)).steps.size() == c.ops + 1);
  }
  // A yielded chain gets one step per operation.
  CHECK(generate_utterance(tcr::translate_source("df['Missions'].str.count('STS')", s)).steps.size() == 2);
}

TEST_CASE("multi-statement programs get one step per statement") {
  tcr::Schema s = testsupport::schema_of(testsupport::astronauts());
  auto p = tcr::translate_source(
      "df['a'] = df['Space Walks'] + 1\ndf['b'] = df['a'] * 2\ndf['c'] = df['Missions'].str.count(',')", s);
  auto u = generate_utterance(p);
  REQUIRE(u.steps.size() == 3);
  CHECK(u.steps[0].text == "create column a from column Space Walks + 1");
  CHECK(u.steps[2].statement == 2);
}

TEST_CASE("index adjustment") {
  CHECK(adjust_index_outbound(1) == 2);
  CHECK(adjust_index_outbound(0) == 1);
  CHECK(adjust_index_outbound(41) == 42);
  CHECK(adjust_index_inbound(1) == 0);
  CHECK(error_code_of([] { adjust_index_inbound(0); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { adjust_index_outbound(-1); }) == ErrorCode::InvalidArgument);
  for (std::int64_t k = 1; k <= 100; ++k) {
    CHECK(adjust_index_outbound(adjust_index_inbound(k)) == k);
    CHECK(adjust_index_inbound(adjust_index_outbound(k - 1)) == k - 1);
  }

  CHECK(detect_index("element 2") == 1);
  CHECK(detect_index("position 1") == 0);
  CHECK(detect_index("first") == 0);
  CHECK(detect_index("third") == 2);
  CHECK(detect_index("last") == -1);
  CHECK(!detect_index("somewhere"));
}

TEST_CASE("element positions display one-based") {
  tcr::Schema s = testsupport::schema_of(testsupport::astronauts());
  auto u = generate_utterance(tcr::translate_source("df['m'] = df['Missions'].str.split(',').str[1]", s));
  CHECK(u.text().find("word 2") != std::string::npos);
  auto elem = generate_utterance(tcr::translate_source("df['Space Flight (hr)'][1]", s));
  CHECK(elem.texts().back() == "select element 2");
  CHECK(parse_grounded(elem.texts(), s).statements.at(0).expr.index == 1);
  auto back = parse_grounded(u.texts(), s);
  CHECK(back.statements.at(0).expr.index == 1);
  auto first = generate_utterance(tcr::translate_source("df['m'] = df['Missions'].str[0]", s));
  CHECK(first.text().find("character 1") != std::string::npos);
}

TEST_CASE("parse_grounded examples") {
  tcr::Schema bowl = testsupport::schema_of(testsupport::superbowl());
  auto p = parse_grounded(split_steps("(1) select rows where column Winner is New Orleans Saints, (2) count"), bowl);
  REQUIRE(p.statements.size() == 1);
  CHECK(p.statements[0].expr.kind == tcr::Kind::Count);
  CHECK(p.statements[0].expr.subject().kind == tcr::Kind::RowFilter);

  tcr::Schema astro = testsupport::schema_of(testsupport::astronauts());
  auto q = parse_grounded(split_steps("(1) create column Mission Count, (2) count ',' from column Missions + 1"), astro);
  REQUIRE(q.statements.size() == 1);
  CHECK(q.statements[0].kind == tcr::Statement::Kind::CreateColumn);
  CHECK(q.statements[0].name == "Mission Count");
  CHECK(q.statements[0].expr.kind == tcr::Kind::Add);
  CHECK(q.statements[0].expr.args[0].kind == tcr::Kind::CountOccurrences);

  try {
    parse_grounded({"please do magic"}, astro);
    FAIL("expected GrammarMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GrammarMismatch);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
  CHECK(error_code_of([&] { parse_grounded({"select column Nope", "count"}, astro); }) == ErrorCode::GrammarMismatch);
}

TEST_CASE("split and concat") {
  CHECK(split_steps("(1) select rows where column Winner is New Orleans Saints, (2) count") ==
        std::vector<std::string>{"select rows where column Winner is New Orleans Saints", "count"});
  CHECK(split_steps("count rows") == std::vector<std::string>{"count rows"});
  CHECK(concat_steps({"select rows where column Winner is New Orleans Saints", "count"}) ==
        "(1) select rows where column Winner is New Orleans Saints, (2) count");
  CHECK(concat_steps({"x"}) == "(1) x");
  CHECK(concat_steps({"a", "  ", "b"}) == "(1) a, (2) b");
  CHECK(error_code_of([] { concat_steps({"", " "}); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { concat_steps({}); }) == ErrorCode::InvalidArgument);

  // Steps containing commas survive a concat/split round trip.
  std::vector<std::string> steps = {"create column mission_count from len from the text split on ',' from column Missions",
                                    "create column x from column mission_count + 1"};
  CHECK(split_steps(concat_steps(steps)) == steps);
}

TEST_CASE("forms without templates are unavailable") {
  tcr::Schema s = testsupport::schema_of(testsupport::astronauts());
  auto p = tcr::translate_source("df['Space Walks'] = [1, 2, 3]", s);
  CHECK(error_code_of([&] { generate_utterance(p); }) == ErrorCode::ExplanationUnavailable);
}

TEST_CASE("template table is well formed") {
  std::set<std::string> ids;
  for (const auto& t : template_table()) {
    CHECK(ids.insert(t.id).second);
    CHECK((!t.chain.empty() || !t.inline_form.empty()));
  }
  CHECK(find_template(template_table().front().id).id == template_table().front().id);
}
