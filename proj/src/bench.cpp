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


#include "nl2grid/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "nl2grid/object_code.hpp"

namespace nl2grid::bench {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool ends_interaction(ErrorCode code) {
  return code == ErrorCode::UnsupportedConstruct || code == ErrorCode::UnsupportedApi ||
         code == ErrorCode::ExplanationUnavailable;
}

bool has_literal_list(const tcr::Expr& e) {
  if (e.kind == tcr::Kind::LiteralList) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_literal_list);
}

// Parse, translate and evaluate; overwrites are allowed so they can be
// classified rather than refused.
void execute(const std::string& code, const Table& table, std::optional<tcr::Program>& program,
             std::optional<interp::EvalOutput>& output) {
  tcr::Schema schema = tcr::Schema::from_table(table);
  program = tcr::translate_source(code, schema);
  output = interp::evaluate(*program, table, std::vector<std::string>{});
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Display width of UTF-8 text, counting code points.
std::size_t width(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

std::string pad_left(const std::string& s, std::size_t w) {
  std::size_t cur = width(s);
  return cur >= w ? s : std::string(w - cur, ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
  std::size_t cur = width(s);
  return cur >= w ? s : s + std::string(w - cur, ' ');
}

json pct_json(std::optional<double> p) { return p ? json(*p) : json(nullptr); }

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Full: return "Full";
    case Termination::NoUtterance: return "NoUtterance";
    case Termination::GenFail: return "GenFail";
    case Termination::ExecFail: return "ExecFail";
  }
  return "GenFail";
}

std::string_view to_string(FailureMode m) {
  switch (m) {
    case FailureMode::GenerationFailure: return "GenerationFailure";
    case FailureMode::ExecutionFailure: return "ExecutionFailure";
    case FailureMode::OutputTypeFailure: return "OutputTypeFailure";
    case FailureMode::RawDataOutput: return "RawDataOutput";
    case FailureMode::OverwriteAttempt: return "OverwriteAttempt";
    case FailureMode::OutputMismatch: return "OutputMismatch";
    case FailureMode::Success: return "Success";
  }
  return "Success";
}

std::optional<FailureMode> failure_mode_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(FailureMode::Success); ++i)
    if (to_string(static_cast<FailureMode>(i)) == s) return static_cast<FailureMode>(i);
  return std::nullopt;
}

CodeEquality code_generation_equality(const codegen::Completion& c1, const codegen::Completion& c2) {
  CodeEquality eq;
  eq.raw = trim(c1.text) == trim(c2.text);
  try {
    auto canonical = [](const std::string& text) {
      object::Ast ast = object::parse(text);
      std::erase_if(ast.statements, [](const object::Stmt& s) { return object::is_noop_print(s); });
      return object::emit(ast);
    };
    eq.normalized = canonical(c1.text) == canonical(c2.text);
  } catch (const Error&) {
    eq.normalized = eq.raw;
  }
  return eq;
}

RoundTripRecord run_round_trip(const BenchCase& c, const codegen::BackendConfig& backend) {
  RoundTripRecord r;
  r.case_id = c.id;
  auto stop = [&](int stage, Termination t, std::optional<ErrorCode> code, std::string message) {
    r.termination = t;
    r.failure = StageFailure{stage, code, std::move(message)};
  };

  [&] {
    // 1: prompt and first generation
    try {
      r.c1 = codegen::generate(backend, codegen::build_prompt(c.table, c.query));
    } catch (const Error& e) {
      return stop(1, Termination::GenFail, e.code(), e.what());
    }
    if (trim(r.c1.text).empty()) return stop(1, Termination::GenFail, std::nullopt, "no completion");

    // 2: execute C1
    try {
      execute(r.c1.text, c.table, r.p1, r.o1);
    } catch (const Error& e) {
      return stop(2, ends_interaction(e.code()) ? Termination::NoUtterance : Termination::ExecFail, e.code(),
                  e.what());
    }

    // 3: grounded utterance
    try {
      r.g1 = utterance::generate_utterance(*r.p1);
    } catch (const Error& e) {
      return stop(3, Termination::NoUtterance, e.code(), e.what());
    }

    // 4: Update & Go without edits
    try {
      r.q2 = utterance::concat_steps(r.g1->texts());
      r.c2 = codegen::generate(backend, codegen::build_prompt(c.table, r.q2));
    } catch (const Error& e) {
      return stop(4, Termination::GenFail, e.code(), e.what());
    }
    if (trim(r.c2->text).empty()) return stop(4, Termination::GenFail, std::nullopt, "no completion");

    // 5: execute C2
    try {
      execute(r.c2->text, c.table, r.p2, r.o2);
    } catch (const Error& e) {
      return stop(5, Termination::ExecFail, e.code(), e.what());
    }
    r.termination = Termination::Full;
  }();

  if (r.c2 && !trim(r.c2->text).empty()) r.code_equality = code_generation_equality(r.c1, *r.c2);
  r.output_equivalent = r.o1 && r.o2 && outputs_equivalent(r.o1->output, r.o2->output);
  r.mode = classify_failure(r, c.expected);
  return r;
}

FailureMode classify_failure(const RoundTripRecord& record, const std::optional<TabularOutput>& expected) {
  if (record.failure && record.failure->stage == 1) return FailureMode::GenerationFailure;
  if (!record.p1 || !record.o1) {
    bool undisplayable = record.failure && record.failure->code == ErrorCode::UndisplayableOutput;
    return undisplayable ? FailureMode::OutputTypeFailure : FailureMode::ExecutionFailure;
  }
  for (const auto& s : record.p1->statements)
    if (has_literal_list(s.expr)) return FailureMode::RawDataOutput;
  if (!record.p1->overwrites.empty()) return FailureMode::OverwriteAttempt;
  if (expected && !outputs_equivalent(*expected, record.o1->output)) return FailureMode::OutputMismatch;
  return FailureMode::Success;
}

std::optional<double> MetricsReport::code_equality_pct() const {
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(code_equal_normalized) / static_cast<double>(n);
}

std::optional<double> MetricsReport::code_equality_raw_pct() const {
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(code_equal_raw) / static_cast<double>(n);
}

std::optional<double> MetricsReport::output_equivalence_pct() const {
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(output_equal) / static_cast<double>(n);
}

std::string format_pct(std::optional<double> pct) {
  if (!pct) return "—";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", *pct);
  return buf;
}

std::string MetricsReport::render(const std::string& dataset) const {
  std::vector<std::string> header = {"Dataset", "N", "CGE", "OE", "CGE raw"};
  std::vector<std::string> row = {dataset, std::to_string(n), format_pct(code_equality_pct()),
                                  format_pct(output_equivalence_pct()), format_pct(code_equality_raw_pct())};
  std::vector<std::size_t> w(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = std::max(width(header[i]), width(row[i]));

  auto line = [&](const std::vector<std::string>& cells) {
    std::string out = pad_right(cells[0], w[0]);
    for (std::size_t i = 1; i < cells.size(); ++i) out += " | " + pad_left(cells[i], w[i]);
    return out + "\n";
  };
  std::string out = line(header);
  out += std::string(w[0], '-');
  for (std::size_t i = 1; i < w.size(); ++i) out += "-+-" + std::string(w[i], '-');
  out += "\n" + line(row);
  out += "\nN = cases whose steps were generated (" + std::to_string(n) + " of " + std::to_string(total) + ")\n";
  out += "CGE = code generation equality after dropping print(df); CGE raw = byte equality; OE = output equivalence\n";
  out += "Percentages are over N. Comments are dropped before code is compared.\n";
  out += "\nTerminations:";
  for (auto t : {Termination::Full, Termination::NoUtterance, Termination::GenFail, Termination::ExecFail}) {
    auto it = terminations.find(t);
    out += " " + std::string(to_string(t)) + "=" + std::to_string(it == terminations.end() ? 0 : it->second);
  }
  out += "\nFailure modes:";
  for (int i = 0; i <= static_cast<int>(FailureMode::Success); ++i) {
    auto m = static_cast<FailureMode>(i);
    auto it = failures.find(m);
    out += " " + std::string(to_string(m)) + "=" + std::to_string(it == failures.end() ? 0 : it->second);
  }
  return out + "\n";
}

MetricsReport report(const std::vector<RoundTripRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no records to report");
  MetricsReport m;
  m.total = records.size();
  for (const auto& r : records) {
    ++m.failures[r.mode];
    ++m.terminations[r.termination];
    if (!r.g1) continue;
    ++m.n;
    if (r.c2 && r.code_equality.normalized) ++m.code_equal_normalized;
    if (r.c2 && r.code_equality.raw) ++m.code_equal_raw;
    if (r.output_equivalent) ++m.output_equal;
  }
  return m;
}

std::vector<RoundTripRecord> run_all(const std::vector<BenchCase>& cases, const codegen::BackendConfig& backend,
                                     unsigned workers) {
  std::vector<RoundTripRecord> records(cases.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(cases.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) records[i] = run_round_trip(cases[i], backend);
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return records;
}

std::vector<BenchCase> load_corpus(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "corpus directory not found: " + dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<BenchCase> cases;
  for (const auto& d : dirs) {
    std::string id = d.filename().string();
    try {
      BenchCase c{id, parse_csv(read_file(d / "table.csv")), trim(read_file(d / "query.txt")), std::nullopt};
      bool has_csv = fs::exists(d / "expected.csv");
      std::optional<json> meta;
      if (fs::exists(d / "expected.json")) meta = json::parse(read_file(d / "expected.json"));
      if (meta && meta->contains("value")) {
        c.expected = TabularOutput::single(io::value_from_json((*meta)["value"]));
      } else if (meta && !has_csv) {
        c.expected = io::output_from_json(*meta);
      } else if (has_csv) {
        Table t = parse_csv(read_file(d / "expected.csv"), "result");
        bool as_table = meta && meta->value("shape", std::string()) == "NewTable";
        c.expected = as_table ? TabularOutput::new_table(std::move(t)) : TabularOutput::new_columns(t.columns());
      }
      cases.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "case " + id + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "case " + id + ": " + e.what());
    }
  }
  return cases;
}

std::string report_json(const MetricsReport& m, const std::vector<RoundTripRecord>& records, int indent) {
  json terms = json::object();
  for (auto t : {Termination::Full, Termination::NoUtterance, Termination::GenFail, Termination::ExecFail}) {
    auto it = m.terminations.find(t);
    terms[std::string(to_string(t))] = it == m.terminations.end() ? 0 : it->second;
  }
  json fails = json::object();
  for (int i = 0; i <= static_cast<int>(FailureMode::Success); ++i) {
    auto mode = static_cast<FailureMode>(i);
    auto it = m.failures.find(mode);
    fails[std::string(to_string(mode))] = it == m.failures.end() ? 0 : it->second;
  }
  json recs = json::array();
  for (const auto& r : records) {
    json rec = {{"id", r.case_id},
                {"termination", std::string(to_string(r.termination))},
                {"failure_mode", std::string(to_string(r.mode))},
                {"c1", r.c1.text},
                {"steps", r.g1 ? io::steps_to_json(*r.g1) : json(nullptr)},
                {"q2", r.g1 ? json(r.q2) : json(nullptr)},
                {"c2", r.c2 ? json(r.c2->text) : json(nullptr)},
                {"code_equal_raw", r.c2 ? json(r.code_equality.raw) : json(nullptr)},
                {"code_equal_normalized", r.c2 ? json(r.code_equality.normalized) : json(nullptr)},
                {"output_equivalent", r.output_equivalent},
                {"o1", r.o1 ? io::eval_to_json(*r.o1) : json(nullptr)},
                {"error", nullptr}};
    if (r.failure) {
      rec["error"] = {{"stage", r.failure->stage},
                      {"code", r.failure->code ? json(std::string(to_string(*r.failure->code))) : json(nullptr)},
                      {"message", r.failure->message}};
    }
    recs.push_back(std::move(rec));
  }
  json doc = {{"schema_version", 1},
              {"total", m.total},
              {"N", m.n},
              {"code_generation_equality", {{"normalized", pct_json(m.code_equality_pct())},
                                            {"raw", pct_json(m.code_equality_raw_pct())}}},
              {"output_equivalence", pct_json(m.output_equivalence_pct())},
              {"terminations", terms},
              {"failure_modes", fails},
              {"notes", json::array({"percentages are over N, the cases whose steps were generated",
                                     "comments are dropped before code is compared"})},
              {"records", recs}};
  return doc.dump(indent);
}

}  // namespace nl2grid::bench
