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


/* C interface to nl2grid. Handles are opaque; every call returns a status and
 * leaves a message for nl2grid_last_error() on failure. Strings returned via
 * out-parameters are owned by the caller and released with
 * nl2grid_string_free(). */

#ifndef NL2GRID_NL2GRID_H_
#define NL2GRID_NL2GRID_H_

#include <stddef.h>

#if defined(_WIN32)
#define NL2GRID_API __declspec(dllexport)
#else
#define NL2GRID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nl2grid_status {
  NL2GRID_OK = 0,
  NL2GRID_INVALID_ARGUMENT = 1,
  NL2GRID_CSV_EMPTY_BODY = 2,
  NL2GRID_CSV_RAGGED_ROW = 3,
  NL2GRID_CSV_DUPLICATE_HEADER = 4,
  NL2GRID_CSV_MALFORMED = 5,
  NL2GRID_UNTYPEABLE_COLUMN = 6,
  NL2GRID_SYNTAX_ERROR = 7,
  NL2GRID_UNSUPPORTED_CONSTRUCT = 8,
  NL2GRID_UNSUPPORTED_API = 9,
  NL2GRID_UNKNOWN_COLUMN = 10,
  NL2GRID_TYPE_MISMATCH = 11,
  NL2GRID_AMBIGUOUS_SUBSCRIPT = 12,
  NL2GRID_EXPLANATION_UNAVAILABLE = 13,
  NL2GRID_GRAMMAR_MISMATCH = 14,
  NL2GRID_OVERWRITE_REFUSED = 15,
  NL2GRID_RUNTIME_FAULT = 16,
  NL2GRID_UNSUPPORTED_AT_RUNTIME = 17,
  NL2GRID_UNDISPLAYABLE_OUTPUT = 18,
  NL2GRID_TRANSPORT_ERROR = 19,
  NL2GRID_AUTH_ERROR = 20,
  NL2GRID_NOT_FOUND = 21,
  NL2GRID_IO_ERROR = 22,
  NL2GRID_INTERNAL = 23
} nl2grid_status;

typedef struct nl2grid_table nl2grid_table;
typedef struct nl2grid_backend nl2grid_backend;
typedef struct nl2grid_session nl2grid_session;

NL2GRID_API const char* nl2grid_version(void);
NL2GRID_API const char* nl2grid_status_name(nl2grid_status status);
/* Message of the last failed call on this thread; "" if none. */
NL2GRID_API const char* nl2grid_last_error(void);
NL2GRID_API void nl2grid_string_free(char* s);

/* Tables */
NL2GRID_API nl2grid_status nl2grid_table_parse_csv(const char* text, size_t len, nl2grid_table** out);
NL2GRID_API nl2grid_status nl2grid_table_load(const char* path, nl2grid_table** out);
NL2GRID_API void nl2grid_table_free(nl2grid_table* table);
NL2GRID_API size_t nl2grid_table_num_rows(const nl2grid_table* table);
NL2GRID_API size_t nl2grid_table_num_columns(const nl2grid_table* table);
NL2GRID_API nl2grid_status nl2grid_table_to_json(const nl2grid_table* table, char** out);
NL2GRID_API nl2grid_status nl2grid_table_to_csv(const nl2grid_table* table, char** out);

/* Backends. rules_json may be NULL for the bundled rules. */
NL2GRID_API nl2grid_status nl2grid_backend_mock(const char* rules_json, nl2grid_backend** out);
NL2GRID_API nl2grid_status nl2grid_backend_http(const char* endpoint, const char* model, const char* token,
                                                nl2grid_backend** out);
/* Reads NL2GRID_API_URL, NL2GRID_API_KEY and optionally NL2GRID_MODEL. */
NL2GRID_API nl2grid_status nl2grid_backend_http_from_env(nl2grid_backend** out);
NL2GRID_API void nl2grid_backend_free(nl2grid_backend* backend);
/* Prompt text the backend would receive. */
NL2GRID_API nl2grid_status nl2grid_prompt(const nl2grid_table* table, const char* query, char** out);

/* Grounded steps for a code snippet over a table. With as_json the result is
 * {"steps": [...], "utterance": "...", "tcr": {...}}; otherwise the
 * "(1) ..., (2) ..." text. */
NL2GRID_API nl2grid_status nl2grid_explain(const char* code, const nl2grid_table* table, int as_json, char** out);

/* Sessions. Query and step results are ResultView JSON documents; model
 * failures are reported inside them with NL2GRID_OK. Backend transport
 * failures return NL2GRID_TRANSPORT_ERROR or NL2GRID_AUTH_ERROR and still set
 * *out_json. */
NL2GRID_API nl2grid_status nl2grid_session_create(const nl2grid_backend* backend, const nl2grid_table* table,
                                                  nl2grid_session** out);
NL2GRID_API void nl2grid_session_free(nl2grid_session* session);
NL2GRID_API nl2grid_status nl2grid_session_query(nl2grid_session* session, const char* query, int debug,
                                                 char** out_json);
NL2GRID_API nl2grid_status nl2grid_session_steps(nl2grid_session* session, const char* const* steps, size_t count,
                                                 int debug, char** out_json);
NL2GRID_API nl2grid_status nl2grid_session_info(const nl2grid_session* session, char** out_json);

/* Round-trip benchmark over a corpus directory. workers 0 uses every core.
 * Either output pointer may be NULL. */
NL2GRID_API nl2grid_status nl2grid_bench_run(const char* corpus_dir, const nl2grid_backend* backend,
                                             unsigned workers, const char* label, char** out_text,
                                             char** out_json);

/* Blocks serving the HTTP API until SIGINT or SIGTERM. snapshot_path may be
 * NULL; otherwise sessions are loaded from it at start and saved at exit. */
NL2GRID_API nl2grid_status nl2grid_serve(const nl2grid_backend* backend, const char* host, int port,
                                         const char* snapshot_path);

#ifdef __cplusplus
}
#endif

#endif /* NL2GRID_NL2GRID_H_ */
