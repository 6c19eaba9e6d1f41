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

#pragma once

#include <vector>

namespace testsupport {

struct Golden {
  const char* fixture;
  const char* code;
  const char* utterance;
};

// Code and grounded utterance pairs as printed in the user-study tables,
// typographic quotes included.
inline const std::vector<Golden>& goldens() {
  static const std::vector<Golden> g = {
      {"astronauts", "df['Mission Length'] = df['Space Flight (hr)'] / df['Missions'].str.count('STS')",
       "(1) create column “Mission Length”, (2) column “Space Flight (hr)” divided by count "
       "“STS” from column “Missions”"},
      {"astronauts", "df['Missions'].str.count('STS')",
       "(1) select column “Missions”, (2) calculate count “STS”"},
      {"astronauts", "df['mission_count'] = df['Missions'].str.split(',').str.len()",
       "(1) create column mission_count, (2) select column Missions, (3) split the text on ',', (4) len"},
      {"astronauts",
       "df['mission_count'] = df['Missions'].str.split(',').str.len()\n"
       "df['Space Flight (hr)'] = df['Space Flight (hr)'] / df['mission_count']",
       "(1) create column mission_count from len from the text split on ',' from column Missions, (2) create column "
       "Space Flight (hr) from column Space Flight (hr) divided by column mission_count."},
      {"houses", "df['good'] = ((df['yr_built'] >= 1970) & (df['sqft_basement'] != 0) & (df['yr_renovated'] != 0))",
       "(1) create column good, (2) column yr_built greater than or equal to 1970 and column sqft_basement NotEq 0 "
       "and column yr_renovated NotEq 0."},
      {"houses", "df['good'] = df['yr_built'] >= 1970",
       "(1) create column good, (2) column yr_built greater than or equal to 1970."},
      {"superbowl", "df[df['Host City'] == 'New Orleans'].shape[0]",
       "(1) select rows where column Host City is New Orleans, (2) return number of rows."},
      {"superbowl", "df[df['Winner'] == 'New Orleans Saints'].shape[0]",
       "(1) select rows where column Winner is New Orleans Saints, (2) return number of rows."},
      {"superbowl", "df[df['Host City'] == 'New Orleans']['Winner'].count()",
       "(1) select rows where column Host City is New Orleans, (2) select column Winner, (3) count."},
      {"superbowl", "df[df['Winner'] == 'New Orleans Saints'].count()",
       "(1) select rows where column Winner is New Orleans Saints, (2) count."},
      {"superbowl", "df[df['Winner'].str.contains('New Orleans')]",
       "(1) select rows where contains 'New Orleans' from column Winner."},
      {"houses", "df[(df['yr_built'] > 1970) & (df['yr_renovated'] != 0) & (df['sqft_basement'] != 0)]",
       "(1) select rows where column yr_built greater than 1970 and column yr_renovated NotEq 0 and column "
       "sqft_basement NotEq 0."},
      {"astronauts",
       "df['Space Flight (hr) per Mission'] = df['Space Flight (hr)'] / df['Missions'].str.count(',') + 1",
       "(1) create column Space Flight (hr) per Mission, (2) column Space Flight (hr) divided by count “,” "
       "from column Missions + 1."},
      {"superbowl", "df['Winner City'] = df['Winner'].str.replace(r'\\b\\w+\\b', '')",
       "(1) create column Winner City, (2) select column Winner, (3) replace '\\b\\w+\\b' with ''."},
      {"astronauts", "df['Mission Count'] = df['Missions'].str.count(',') + 1",
       "(1) create column Mission Count, (2) count ‘,’ from column Missions + 1."},
  };
  return g;
}

}  // namespace testsupport
