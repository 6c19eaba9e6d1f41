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


// JSON forms of cells, tables and outputs shared by the bench report, the
// service and the C API.

#pragma once

#include "json.hpp"

#include "nl2grid/interp.hpp"
#include "nl2grid/table.hpp"
#include "nl2grid/utterance.hpp"

namespace nl2grid::io {

using json = nlohmann::json;

/// null, number, string, bool, {"date": "YYYY-MM-DD"} or an array.
json value_to_json(const Value& v);
/// Throws Error(InvalidArgument) for shapes value_to_json never writes.
Value value_from_json(const json& j);

json column_to_json(const Column& c);
json table_to_json(const Table& t);
Table table_from_json(const json& j);

json output_to_json(const TabularOutput& o);
TabularOutput output_from_json(const json& j);

/// {shape, placement, created_columns, value | columns | table}
json eval_to_json(const interp::EvalOutput& e);
interp::EvalOutput eval_from_json(const json& j);

json steps_to_json(const utterance::GroundedUtterance& g);

}  // namespace nl2grid::io
