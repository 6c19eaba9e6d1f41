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


// Native evaluation of TCR programs over an in-memory table.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nl2grid/table.hpp"
#include "nl2grid/tcr.hpp"

namespace nl2grid::interp {

enum class Placement { AppendToGrid, SidePaneOnly };

std::string_view to_string(Placement p);

struct EvalOutput {
  TabularOutput output;
  Placement placement = Placement::SidePaneOnly;
  std::vector<std::string> created_column_names;
};

/// New columns and rows join the grid; values and tables go to the side pane.
Placement classify_output(const TabularOutput& output);

/// Runs a typed program. The input table is never modified.
///
/// `protected_columns` are the names a CreateColumn may not reuse; by default
/// every column of `table`. Throws Error(OverwriteRefused | RuntimeFault |
/// UnsupportedAtRuntime | UndisplayableOutput).
EvalOutput evaluate(const tcr::Program& program, const Table& table,
                    const std::optional<std::vector<std::string>>& protected_columns = std::nullopt);

/// The table with an output's new columns appended (or updated), unchanged
/// for side-pane outputs.
Table apply_output(const Table& table, const EvalOutput& out);

}  // namespace nl2grid::interp
