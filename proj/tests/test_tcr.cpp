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
#include "nl2grid/object_code.hpp"
#include "support.hpp"

using namespace nl2grid;
using namespace nl2grid::tcr;
using testsupport::error_code_of;

namespace {

const char* const kCode1 = "df['Mission Length'] = df['Space Flight (hr)'] / df['Missions'].str.count('STS')";

const ElemType kNum{CellType::Number, false};
const ElemType kText{CellType::Text, false};
const ElemType kBool{CellType::Bool, false};

Schema astro() { return testsupport::schema_of(testsupport::astronauts()); }
Schema bowl() { return testsupport::schema_of(testsupport::superbowl()); }

Expr single_expr(std::string_view src, const Schema& s) {
  Program p = translate_source(src, s);
  REQUIRE(p.statements.size() == 1);
  return p.statements[0].expr;
}

}  // namespace

TEST_CASE("types of the mission examples") {
  Schema s = astro();
  CHECK(infer_type(pattern_op(Kind::CountOccurrences, col("Missions"), "STS"), s) == Type::series(kNum));
  CHECK(infer_type(unary_op(Kind::Shape, frame_ref()), s) ==
        Type::labeled_tuple({"rows", "columns"}, {kNum, kNum}));
  CHECK(error_code_of([&] { infer_type(col("NoSuchCol"), s); }) == ErrorCode::UnknownColumn);
  CHECK(infer_type(split(col("Missions"), ","), s) == Type::series({CellType::Text, true}));
  CHECK(infer_type(binary(Kind::Eq, col("Name"), literal(Value::text("x"))), s) == Type::series(kBool));
  CHECK(infer_type(binary(Kind::Eq, literal(Value::number(1)), literal(Value::number(2))), s) ==
        Type::scalar(kBool));
  CHECK(infer_type(unary_op(Kind::Mean, col("Space Flight (hr)")), s) == Type::scalar(kNum));
  CHECK(infer_type(unary_op(Kind::Max, col("Name")), s) == Type::scalar(kText));
  CHECK(infer_type(unary_op(Kind::DateYear, col("Birth Date")), s) == Type::series(kNum));
  CHECK(infer_type(unary_op(Kind::GroupSize, group_by(frame_ref(), {"Status"})), s).is_frame());
}

TEST_CASE("type mismatches") {
  Schema s = astro();
  CHECK(error_code_of([&] { infer_type(binary(Kind::Div, col("Name"), col("Missions")), s); }) ==
        ErrorCode::TypeMismatch);
  CHECK(error_code_of([&] { infer_type(pattern_op(Kind::Contains, col("Space Walks"), "1"), s); }) ==
        ErrorCode::TypeMismatch);
  CHECK(error_code_of([&] { infer_type(row_filter(frame_ref(), col("Name")), s); }) == ErrorCode::TypeMismatch);
  CHECK(error_code_of([&] { infer_type(binary(Kind::Gt, col("Name"), literal(Value::number(3))), s); }) ==
        ErrorCode::TypeMismatch);
  CHECK(error_code_of([&] { infer_type(unary_op(Kind::DateYear, col("Name")), s); }) == ErrorCode::TypeMismatch);
}

TEST_CASE("mission length translates without the accessor") {
  Schema s = astro();
  Program p = translate_source(kCode1, s);
  REQUIRE(p.statements.size() == 1);
  CHECK(p.statements[0].kind == Statement::Kind::CreateColumn);
  CHECK(p.statements[0].name == "Mission Length");
  Program expected;
  expected.statements.push_back({Statement::Kind::CreateColumn, "Mission Length",
                                 binary(Kind::Div, col("Space Flight (hr)"),
                                        pattern_op(Kind::CountOccurrences, col("Missions"), "STS"))});
  CHECK(p == typecheck(expected, s));
  CHECK(p.overwrites.empty());
  CHECK(render_code(p, s) == kCode1);
}

TEST_CASE("subscripts resolve by base type") {
  Schema s = astro();
  Expr e = single_expr("df['Missions'].str[0]", s);
  CHECK(e.kind == Kind::ElemIndex);
  CHECK(e.index_kind == IndexKind::CharOfText);
  CHECK(e.index == 0);

  e = single_expr("df['Missions'].str.split(',').str[1]", s);
  CHECK(e.kind == Kind::ElemIndex);
  CHECK(e.index_kind == IndexKind::WordOfList);

  e = single_expr("df['Space Flight (hr)'][2]", s);
  CHECK(e.index_kind == IndexKind::ElementOfSeries);

  e = single_expr("df.shape[1]", s);
  CHECK(e.index_kind == IndexKind::TupleField);
  CHECK(e.name == "columns");

  e = single_expr("df[df['Space Walks'] > 0]", s);
  CHECK(e.kind == Kind::RowFilter);

  CHECK(error_code_of([&] { translate_source("df['Space Walks'].sum()[0]", s); }) ==
        ErrorCode::AmbiguousSubscript);
}

TEST_CASE("filtered shape becomes a row count") {
  Schema s = bowl();
  Expr e = single_expr("df[df['Host City'] == 'New Orleans'].shape[0]", s);
  Expr expected = unary_op(Kind::RowCount, row_filter(frame_ref(), binary(Kind::Eq, col("Host City"),
                                                                           literal(Value::text("New Orleans")))));
  annotate(expected, s);
  CHECK(e == expected);
  CHECK(e.type == Type::scalar(kNum));
}

TEST_CASE("comma count program renders back exactly") {
  Schema s = astro();
  const char* src = "df['Mission Count'] = df['Missions'].str.count(',') + 1";
  Program p = translate_source(src, s);
  CHECK(render_code(p, s) == src);
  CHECK(p.statements[0].expr.kind == Kind::Add);
  CHECK(render_code(typecheck(Program{{{Statement::Kind::Yield, "", literal(Value::number(3))}}}, s), s) == "3");
}

TEST_CASE("trailing print(df) is dropped with a flag") {
  Schema s = astro();
  Program p = translate_source("df['a'] = df['Space Walks'] * 2\nprint(df)\n", s);
  CHECK(p.statements.size() == 1);
  CHECK(p.dropped_statements == 1);
  CHECK(p == translate_source("df['a'] = df['Space Walks'] * 2", s));
}

TEST_CASE("overwrites are recorded") {
  Schema s = astro();
  Program p = translate_source("df['Space Flight (hr)'] = df['Space Flight (hr)'] / 2", s);
  CHECK(p.overwrites == std::vector<std::string>{"Space Flight (hr)"});
  Program q = translate_source("df['x'] = df['Space Walks']\ndf['x'] = df['x'] + 1", s);
  CHECK(q.overwrites.empty());
}

TEST_CASE("unsupported APIs and names") {
  Schema s = astro();
  CHECK(error_code_of([&] { translate_source("df['Name'].value_counts()", s); }) == ErrorCode::UnsupportedApi);
  CHECK(error_code_of([&] { translate_source("np.mean(df['Space Walks'])", s); }) == ErrorCode::UnsupportedApi);
  CHECK(error_code_of([&] { translate_source("df['Nope'].sum()", s); }) == ErrorCode::UnknownColumn);
  CHECK(error_code_of([&] { translate_source("df.groupby('Status')", s); }) == ErrorCode::UndisplayableOutput);
  CHECK(error_code_of([&] { translate_source("df = df[df['Space Walks'] > 0]", s); }) ==
        ErrorCode::UnsupportedApi);
}

TEST_CASE("bindings thread through and inline away") {
  Schema s = astro();
  Program p = translate_source("n = df['Missions'].str.count(',') + 1\ndf['per'] = df['Space Flight (hr)'] / n", s);
  REQUIRE(p.statements.size() == 2);
  CHECK(p.statements[0].kind == Statement::Kind::BindVar);
  Program inl = inline_bindings(p);
  REQUIRE(inl.statements.size() == 1);
  CHECK(inl == translate_source("df['per'] = df['Space Flight (hr)'] / (df['Missions'].str.count(',') + 1)", s));
}

TEST_CASE("created columns extend the schema") {
  Schema s = astro();
  Program p = translate_source("df['c'] = df['Missions'].str.count(',') + 1\ndf['d'] = df['c'] > 1", s);
  Schema ext = extended_schema(p, s);
  CHECK(ext.find("c") == kNum);
  CHECK(ext.find("d") == kBool);
  CHECK(!s.contains("c"));
}

TEST_CASE("JSON tree names node kinds and types") {
  Schema s = astro();
  std::string j = to_json(translate_source(kCode1, s));
  CHECK(j.find("\"CreateColumn\"") != std::string::npos);
  CHECK(j.find("\"CountOccurrences\"") != std::string::npos);
  CHECK(j.find("Series(Number)") != std::string::npos);
}

TEST_CASE("date literals") {
  CHECK(parse_date_literal("2020-02-02") == Date::from_ymd(2020, 2, 2));
  CHECK(parse_date_literal("5/17/67") == Date::from_ymd(1967, 5, 17));
  CHECK(!parse_date_literal("yesterday"));
}
