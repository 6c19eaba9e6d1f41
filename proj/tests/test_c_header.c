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


/* The public header compiles as C and its handles work from C. */

#include <stdio.h>
#include <string.h>

#include "nl2grid/nl2grid.h"

int main(void) {
  nl2grid_table* t = NULL;
  const char* csv = "x\n1\n2\n";
  char* out = NULL;
  int failures = 0;
  if (nl2grid_table_parse_csv(csv, strlen(csv), &t) != NL2GRID_OK) {
    fprintf(stderr, "parse failed: %s\n", nl2grid_last_error());
    return 1;
  }
  if (nl2grid_table_num_rows(t) != 2) ++failures;
  if (nl2grid_explain("df['x'].sum()", t, 0, &out) != NL2GRID_OK) ++failures;
  if (out && strcmp(out, "(1) select column x, (2) calculate sum") != 0) {
    fprintf(stderr, "unexpected explanation: %s\n", out);
    ++failures;
  }
  nl2grid_string_free(out);
  nl2grid_table_free(t);
  printf("%s\n", failures ? "FAIL" : "PASS");
  return failures ? 1 : 0;
}
