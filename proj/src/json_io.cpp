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


#include "json_io.hpp"

#include "nl2grid/error.hpp"
#include "nl2grid/tcr.hpp"

namespace nl2grid::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

CellType cell_type_from(const std::string& s) {
  for (auto t : {CellType::Number, CellType::Text, CellType::Bool, CellType::Date})
    if (to_string(t) == s) return t;
  bad("unknown cell type '" + s + "'");
}

std::vector<Column> columns_from(const json& arr) {
  if (!arr.is_array()) bad("columns must be an array");
  std::vector<Column> out;
  for (const auto& c : arr) {
    if (!c.is_object() || !c.contains("name") || !c.contains("cells")) bad("a column needs name and cells");
    Column col;
    col.name = c["name"].get<std::string>();
    for (const auto& cell : c["cells"]) col.cells.push_back(value_from_json(cell));
    if (c.contains("type")) {
      col.type.cell = cell_type_from(c["type"].get<std::string>());
      col.type.list = c.value("list", false);
    } else {
      for (const auto& v : col.cells) {
        if (v.is_list()) {
          col.type.list = true;
          if (!v.as_list().empty() && v.as_list().front().cell_type()) col.type.cell = *v.as_list().front().cell_type();
          break;
        }
        if (auto t = v.cell_type()) {
          col.type.cell = *t;
          break;
        }
      }
    }
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace

json value_to_json(const Value& v) {
  if (v.is_missing()) return nullptr;
  if (v.is_number()) return v.as_number();
  if (v.is_text()) return v.as_text();
  if (v.is_bool()) return v.as_bool();
  if (v.is_date()) return json{{"date", v.as_date().iso()}};
  json arr = json::array();
  for (const auto& item : v.as_list()) arr.push_back(value_to_json(item));
  return arr;
}

Value value_from_json(const json& j) {
  if (j.is_null()) return Value::missing();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number()) return Value::number(j.get<double>());
  if (j.is_string()) return Value::text(j.get<std::string>());
  if (j.is_array()) {
    Value::List items;
    for (const auto& e : j) items.push_back(value_from_json(e));
    return Value::list(std::move(items));
  }
  if (j.is_object() && j.contains("date") && j["date"].is_string()) {
    auto d = tcr::parse_date_literal(j["date"].get<std::string>());
    if (!d) bad("bad date '" + j["date"].get<std::string>() + "'");
    return Value::date(*d);
  }
  bad("unsupported cell value " + j.dump());
}

json column_to_json(const Column& c) {
  json cells = json::array();
  for (const auto& v : c.cells) cells.push_back(value_to_json(v));
  return {{"name", c.name}, {"type", std::string(to_string(c.type.cell))}, {"list", c.type.list}, {"cells", cells}};
}

json table_to_json(const Table& t) {
  json cols = json::array();
  for (const auto& c : t.columns()) cols.push_back(column_to_json(c));
  return {{"name", t.name()}, {"rows", t.num_rows()}, {"columns", cols}};
}

Table table_from_json(const json& j) {
  if (!j.is_object() || !j.contains("columns")) bad("a table needs columns");
  return Table(j.value("name", std::string("df")), columns_from(j["columns"]));
}

json output_to_json(const TabularOutput& o) {
  json out = {{"shape", std::string(to_string(o.shape))}};
  if (const auto* v = std::get_if<Value>(&o.payload)) {
    out["value"] = value_to_json(*v);
  } else if (const auto* cols = std::get_if<std::vector<Column>>(&o.payload)) {
    json arr = json::array();
    for (const auto& c : *cols) arr.push_back(column_to_json(c));
    out["columns"] = arr;
  } else {
    out["table"] = table_to_json(std::get<Table>(o.payload));
  }
  return out;
}

TabularOutput output_from_json(const json& j) {
  if (!j.is_object()) bad("an output must be an object");
  auto shape = shape_from_string(j.value("shape", std::string("SingleValue")));
  if (!shape) bad("unknown output shape");
  if (*shape == TabularOutput::Shape::SingleValue) {
    if (!j.contains("value")) bad("a single value output needs value");
    return TabularOutput::single(value_from_json(j["value"]));
  }
  if (j.contains("table")) {
    TabularOutput o = TabularOutput::new_table(table_from_json(j["table"]));
    o.shape = *shape;
    return o;
  }
  if (!j.contains("columns")) bad("output needs columns or table");
  auto cols = columns_from(j["columns"]);
  if (*shape == TabularOutput::Shape::NewTable) return TabularOutput::new_table(Table("result", std::move(cols)));
  TabularOutput o = TabularOutput::new_columns(std::move(cols));
  o.shape = *shape;
  return o;
}

json eval_to_json(const interp::EvalOutput& e) {
  json out = output_to_json(e.output);
  out["placement"] = std::string(interp::to_string(e.placement));
  out["created_columns"] = e.created_column_names;
  return out;
}

interp::EvalOutput eval_from_json(const json& j) {
  interp::EvalOutput e;
  e.output = output_from_json(j);
  e.placement = interp::classify_output(e.output);
  if (j.contains("created_columns")) e.created_column_names = j["created_columns"].get<std::vector<std::string>>();
  return e;
}

json steps_to_json(const utterance::GroundedUtterance& g) { return g.texts(); }

}  // namespace nl2grid::io
