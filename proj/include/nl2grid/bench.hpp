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


// Round-trip stability benchmark: query -> code -> output -> steps -> code ->
// output, the failure-mode classifier and the metrics report.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nl2grid/codegen.hpp"
#include "nl2grid/error.hpp"
#include "nl2grid/interp.hpp"
#include "nl2grid/table.hpp"
#include "nl2grid/tcr.hpp"
#include "nl2grid/utterance.hpp"

namespace nl2grid::bench {

enum class Termination { Full, NoUtterance, GenFail, ExecFail };

enum class FailureMode {
  GenerationFailure,
  ExecutionFailure,
  OutputTypeFailure,
  RawDataOutput,
  OverwriteAttempt,
  OutputMismatch,
  Success,
};

std::string_view to_string(Termination t);
std::string_view to_string(FailureMode m);
std::optional<FailureMode> failure_mode_from_string(std::string_view s);

struct BenchCase {
  std::string id;
  Table table;
  std::string query;
  std::optional<TabularOutput> expected;
};

/// The first stage that failed. Stages are numbered 1..5 as in the record.
struct StageFailure {
  int stage = 0;
  std::optional<ErrorCode> code;  // unset for an empty completion
  std::string message;
};

struct CodeEquality {
  bool raw = false;
  bool normalized = false;
};

struct RoundTripRecord {
  std::string case_id;

  codegen::Completion c1;                      // stage 1
  std::optional<tcr::Program> p1;              // stage 2
  std::optional<interp::EvalOutput> o1;
  std::optional<utterance::GroundedUtterance> g1;  // stage 3
  std::string q2;                              // stage 4
  std::optional<codegen::Completion> c2;
  std::optional<tcr::Program> p2;              // stage 5
  std::optional<interp::EvalOutput> o2;

  Termination termination = Termination::GenFail;
  std::optional<StageFailure> failure;

  CodeEquality code_equality;      // meaningful when c2 is present
  bool output_equivalent = false;  // o1 and o2 present and equivalent
  FailureMode mode = FailureMode::GenerationFailure;
};

/// Runs the five stages. Never throws for stage failures; they are recorded.
RoundTripRecord run_round_trip(const BenchCase& c, const codegen::BackendConfig& backend);

/// raw: trimmed byte equality. normalized: canonical emit equality after
/// dropping no-op prints (comments are already dropped by the parser); falls
/// back to raw when either side does not parse.
CodeEquality code_generation_equality(const codegen::Completion& c1, const codegen::Completion& c2);

/// Judges the first pass (C1, P1, O1) of a record. Precedence follows the
/// enum order; OutputMismatch needs an expected output.
FailureMode classify_failure(const RoundTripRecord& record, const std::optional<TabularOutput>& expected);

struct MetricsReport {
  std::size_t total = 0;
  std::size_t n = 0;  // records whose G1 was generated
  std::size_t code_equal_normalized = 0;
  std::size_t code_equal_raw = 0;
  std::size_t output_equal = 0;
  std::map<FailureMode, std::size_t> failures;
  std::map<Termination, std::size_t> terminations;

  /// Percentages over n; nullopt when n is 0.
  std::optional<double> code_equality_pct() const;
  std::optional<double> code_equality_raw_pct() const;
  std::optional<double> output_equivalence_pct() const;

  /// Fixed-width table with one data row labelled `dataset`.
  std::string render(const std::string& dataset = "corpus") const;
};

/// "58.7%", or "—" for an undefined value.
std::string format_pct(std::optional<double> pct);

/// Throws Error(InvalidArgument) for an empty record list.
MetricsReport report(const std::vector<RoundTripRecord>& records);

/// Runs every case with `workers` threads; records come back in case order.
std::vector<RoundTripRecord> run_all(const std::vector<BenchCase>& cases, const codegen::BackendConfig& backend,
                                     unsigned workers = 1);

/// Reads one case per subdirectory (sorted by name): table.csv, query.txt and
/// optionally expected.csv (new columns) and/or expected.json. expected.json
/// is {"value": v} for a single value, or {"shape": "NewTable"} to read
/// expected.csv as a new table. Throws Error(IoError | InvalidArgument).
std::vector<BenchCase> load_corpus(const std::filesystem::path& dir);

/// Stable JSON report (schema_version 1) with summary and per-record detail.
std::string report_json(const MetricsReport& report, const std::vector<RoundTripRecord>& records, int indent = 2);

}  // namespace nl2grid::bench
