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


// Randomized invariants across modules. Each generator run is seeded so a
// failure names a reproducible seed.

#include "doctest.h"
#include "support.hpp"

#include "nl2grid/object_code.hpp"
#include "nl2grid/utterance.hpp"

using namespace nl2grid;
using testsupport::ProgramGen;
using testsupport::Rng;

namespace {

constexpr int kPrograms = 250;

std::vector<Table> program_tables() { return {testsupport::superbowl(), testsupport::astronauts()}; }

std::string describe(const tcr::Program& p, const tcr::Schema& s) { return tcr::render_code(p, s); }

bool cell_matches(const Value& v, ElemType t) {
  if (v.is_missing()) return true;
  if (t.list) {
    if (!v.is_list()) return false;
    return std::all_of(v.as_list().begin(), v.as_list().end(),
                       [&](const Value& e) { return e.is_missing() || e.cell_type() == t.cell; });
  }
  return v.cell_type() == t.cell;
}

}  // namespace

TEST_CASE("csv serialization round-trips random tables") {
  for (std::uint32_t seed = 1; seed <= 300; ++seed) {
    Rng r(seed);
    Table t = testsupport::random_table(r);
    CAPTURE(seed);
    Table back = parse_csv(serialize_csv(t));
    CHECK(back == t);
    for (const auto& c : back.columns()) CHECK(c.cells.size() == back.num_rows());
  }
}

TEST_CASE("outputs_equivalent is an equivalence relation") {
  Rng r(7);
  std::vector<TabularOutput> outs;
  for (int i = 0; i < 40; ++i) {
    switch (r.below(3)) {
      case 0: outs.push_back(TabularOutput::single(Value::number(r.below(3)))); break;
      case 1: {
        Column c{"c" + std::to_string(r.below(2)), {CellType::Number, false}, {}};
        for (int k = 0; k < 3; ++k) c.cells.push_back(r.chance(0.2) ? Value::missing() : Value::number(r.below(2)));
        outs.push_back(TabularOutput::new_columns({c}));
        break;
      }
      default: {
        Column c{"t", {CellType::Text, false}, {Value::text(r.chance(0.5) ? "a" : "b")}};
        outs.push_back(TabularOutput::new_table(Table("x", {c})));
      }
    }
  }
  for (const auto& a : outs) {
    CHECK(outputs_equivalent(a, a));
    for (const auto& b : outs) {
      CHECK(outputs_equivalent(a, b) == outputs_equivalent(b, a));
      if (!outputs_equivalent(a, b)) continue;
      for (const auto& c : outs)
        if (outputs_equivalent(b, c)) CHECK(outputs_equivalent(a, c));
    }
  }
}

TEST_CASE("render_code is a translation fixpoint") {
  for (const Table& t : program_tables()) {
    auto schema = testsupport::schema_of(t);
    for (std::uint32_t seed = 1; seed <= kPrograms; ++seed) {
      ProgramGen gen(t, seed);
      tcr::Program p = gen.program();
      std::string code = tcr::render_code(p, schema);
      CAPTURE(seed);
      CAPTURE(code);
      tcr::Program back = tcr::translate_source(code, schema);
      CHECK(back == p);
      CHECK(tcr::render_code(back, schema) == code);
    }
  }
}

TEST_CASE("object code parse/emit fixpoint") {
  for (const Table& t : program_tables()) {
    auto schema = testsupport::schema_of(t);
    for (std::uint32_t seed = 1; seed <= kPrograms; ++seed) {
      ProgramGen gen(t, seed);
      object::Ast ast = tcr::to_object(gen.program(), schema);
      std::string text = object::emit(ast);
      CAPTURE(seed);
      CAPTURE(text);
      CHECK(object::parse(text) == ast);
      CHECK(object::emit(object::parse(text)) == text);
    }
  }
}

TEST_CASE("grounded utterances parse back to the program") {
  for (const Table& t : program_tables()) {
    auto schema = testsupport::schema_of(t);
    for (std::uint32_t seed = 1; seed <= kPrograms; ++seed) {
      ProgramGen gen(t, seed);
      tcr::Program p = gen.program();
      CAPTURE(seed);
      CAPTURE(describe(p, schema));
      utterance::GroundedUtterance g = utterance::generate_utterance(p);
      REQUIRE(!g.steps.empty());
      CAPTURE(g.text());
      CHECK(utterance::parse_grounded(g.texts(), schema) == tcr::inline_bindings(p));
      CHECK(utterance::parse_grounded(utterance::split_steps(g.text()), schema) == tcr::inline_bindings(p));
      CHECK(utterance::generate_utterance(utterance::parse_grounded(g.texts(), schema)).texts() == g.texts());
    }
  }
}

TEST_CASE("grounded steps never show library artifacts") {
  for (const Table& t : program_tables()) {
    for (std::uint32_t seed = 1; seed <= kPrograms; ++seed) {
      ProgramGen gen(t, seed);
      tcr::Program p = gen.program();
      for (const auto& step : utterance::generate_utterance(p).texts()) {
        CAPTURE(step);
        CHECK(step.find(".str") == std::string::npos);
        CHECK(step.find(".dt") == std::string::npos);
        CHECK(step.find("df[") == std::string::npos);
      }
    }
  }
}

TEST_CASE("well-typed programs evaluate without type faults") {
  for (const Table& t : program_tables()) {
    auto schema = testsupport::schema_of(t);
    const Table before = t;
    for (std::uint32_t seed = 1; seed <= kPrograms; ++seed) {
      ProgramGen gen(t, seed);
      tcr::Program p = gen.program();
      CAPTURE(seed);
      CAPTURE(describe(p, schema));
      interp::EvalOutput out;
      try {
        out = interp::evaluate(p, t);
      } catch (const Error& e) {
        CAPTURE(e.what());
        CHECK(e.code() == ErrorCode::RuntimeFault);
        continue;
      }
      CHECK(t == before);
      interp::EvalOutput again = interp::evaluate(p, t);
      CHECK(outputs_equivalent(out.output, again.output));
      CHECK(out.placement == interp::classify_output(out.output));

      tcr::Schema ext = tcr::extended_schema(p, schema);
      if (const auto* cols = std::get_if<std::vector<Column>>(&out.output.payload)) {
        for (const auto& c : *cols) {
          for (const auto& v : c.cells) CHECK(cell_matches(v, c.type));
          if (auto declared = ext.find(c.name)) CHECK(*declared == c.type);
        }
      }
      const tcr::Statement& last = p.statements.back();
      if (last.kind == tcr::Statement::Kind::Yield && last.expr.type.is_scalar()) {
        REQUIRE(out.output.shape == TabularOutput::Shape::SingleValue);
        CHECK(cell_matches(std::get<Value>(out.output.payload), last.expr.type.elem));
      }
    }
  }
}
