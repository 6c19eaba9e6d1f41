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

// Canned round-trip records and helpers for reading rendered report rows.

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nl2grid/bench.hpp"
#include "support.hpp"

namespace testsupport {

// Builds records from the grouped rows of the canned fixture.
inline std::map<std::string, std::vector<bench::RoundTripRecord>> canned_records() {
  std::map<std::string, std::vector<bench::RoundTripRecord>> out;
  Table t = fixture("roundtrip_records");
  for (std::size_t r = 0; r < t.num_rows(); ++r) {
    std::string dataset = t.find("dataset")->cells[r].as_text();
    std::string term = t.find("termination")->cells[r].as_text();
    bool raw = t.find("code_equal_raw")->cells[r].as_number() != 0;
    bool norm = t.find("code_equal_normalized")->cells[r].as_number() != 0;
    bool oe = t.find("output_equivalent")->cells[r].as_number() != 0;
    int count = static_cast<int>(t.find("count")->cells[r].as_number());
    for (int i = 0; i < count; ++i) {
      bench::RoundTripRecord rec;
      rec.case_id = dataset + "-" + std::to_string(out[dataset].size());
      rec.c1.text = "df.shape[0]";
      if (term == "GenFail") {
        rec.termination = bench::Termination::GenFail;
        rec.failure = bench::StageFailure{1, std::nullopt, "no completion"};
        rec.mode = bench::FailureMode::GenerationFailure;
      } else if (term == "NoUtterance") {
        rec.termination = bench::Termination::NoUtterance;
        rec.failure = bench::StageFailure{3, ErrorCode::ExplanationUnavailable, "no template"};
        rec.mode = bench::FailureMode::Success;
      } else {
        rec.g1 = utterance::GroundedUtterance{{{"return number of rows", 0, 0}}};
        rec.q2 = "(1) return number of rows";
        rec.c2 = codegen::Completion{raw ? "df.shape[0]" : "df.shape[0]\nprint(df)", "canned", {}};
        rec.code_equality = {raw, norm};
        rec.output_equivalent = oe;
        rec.termination = term == "Full" ? bench::Termination::Full : bench::Termination::ExecFail;
        if (term == "ExecFail") rec.failure = bench::StageFailure{5, ErrorCode::RuntimeFault, "fault"};
        rec.mode = bench::FailureMode::Success;
      }
      out[dataset].push_back(std::move(rec));
    }
  }
  return out;
}

inline std::string data_row(const std::string& rendered) {
  std::istringstream in(rendered);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  return line;
}

// Collapses runs of padding so rows compare independently of column widths.
inline std::string squeeze(const std::string& s) {
  std::string out;
  for (char c : s)
    if (c != ' ' || (!out.empty() && out.back() != ' ')) out += c;
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace testsupport
