#!/usr/bin/env python3
# Copyright 2026 The nl2grid Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
# SPDX-License-Identifier: Apache-2.0

"""Regenerates tests/corpus.

Each case is a table plus a pandas snippet. The grounded query comes from
`nl2grid explain`; the expected output comes from running the snippet in
pandas, so the interpreter is checked against a separate engine.

  python3 tools/make_corpus.py --nl2grid build/tools/nl2grid
"""

import argparse
import ast
import datetime as dt
import json
import math
import re
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

# (id, fixture, code). A fourth element overrides the code pandas runs when
# the library semantics differ from the pandas default (frame aggregates skip
# text columns; group sizes and transposes come back as plain tables).
CASES = [
    ("astro_sts_count", "astronauts", "df['Missions'].str.count('STS')"),
    ("astro_hours_per_sts", "astronauts",
     "df['Space Flight (hr)'] / df['Missions'].str.count('STS')"),
    ("astro_active_rows", "astronauts", "df[df['Status'] == 'Active']"),
    ("astro_active_count", "astronauts", "df[df['Status'] == 'Active'].shape[0]"),
    ("astro_walkers", "astronauts", "df['Space Walks'] != 0"),
    ("astro_not_sts_names", "astronauts", "df[~df['Missions'].str.contains('STS')]['Name']"),
    ("astro_mission_count", "astronauts", "df['Missions'].str.split(',').str.len()"),
    ("astro_first_name", "astronauts", "df['Name'].str.split(' ').str[0]"),
    ("astro_shuttle", "astronauts", "df['Missions'].str.replace('STS', 'Shuttle')"),
    ("astro_walk_total", "astronauts", "df['Space Walks'].sum()"),
    ("astro_status_count", "astronauts", "df['Status'].count()"),
    ("astro_longest", "astronauts", "df['Space Flight (hr)'].idxmax()"),
    ("astro_birth_year", "astronauts", "df['Birth Date'].dt.year"),
    ("astro_status_sizes", "astronauts", "df.groupby('Status').size()",
     "df.groupby('Status').size().reset_index(name='size')"),
    ("astro_gender_status_sizes", "astronauts", "df.groupby(['Gender', 'Status']).size()",
     "df.groupby(['Gender', 'Status']).size().reset_index(name='size')"),
    ("astro_hours_per_mission", "astronauts",
     "df['Mission Count'] = df['Missions'].str.split(',').str.len()\n"
     "df['Hours per Mission'] = df['Space Flight (hr)'] / df['Mission Count']"),
    ("astro_walk_hours_mean", "astronauts",
     "df[df['Space Walks'] > 0]['Space Walks (hr)'].mean()"),
    ("bowl_margin", "superbowl", "df['Winner Pts'] - df['Loser Pts']"),
    ("bowl_blowouts", "superbowl", "df[(df['Winner Pts'] >= 30) & (df['Loser Pts'] < 20)]"),
    ("bowl_sunbelt_winners", "superbowl",
     "df[(df['Host State'] == 'Florida') | (df['Host State'] == 'California')]['Winner']"),
    ("bowl_state_initial", "superbowl", "df['Host State'].str[0]"),
    ("bowl_first_winner", "superbowl", "df['Winner'].iloc[0]"),
    ("bowl_lower", "superbowl", "df['Winner'].str.lower()"),
    ("bowl_min_loser", "superbowl", "df['Loser Pts'].min()"),
    ("bowl_max_winner", "superbowl", "df['Winner Pts'].max()"),
    ("bowl_shape", "superbowl", "df.shape"),
    ("bowl_columns", "superbowl", "df.shape[1]"),
    ("bowl_week_ceiling", "superbowl", "df['Date'].dt.ceil('7D')"),
    ("bowl_slice", "superbowl", "df.iloc[2:5]"),
    ("bowl_margin_filter", "superbowl",
     "df['Margin'] = df['Winner Pts'] - df['Loser Pts']\n"
     "df[df['Margin'] > 10]['Winner']"),
    ("bowl_patriots", "superbowl", "df[df['Winner'].str.contains('Patriots')].shape[0]"),
    ("house_cheap", "houses", "df['price'] <= 300000"),
    ("house_total_sqft", "houses", "df['sqft_above'] + df['sqft_basement']"),
    ("house_rooms", "houses", "df['bathrooms'] * df['bedrooms']"),
    ("house_price_per_sqft", "houses", "df['price'] / df['sqft_above']"),
    ("house_mean_price", "houses", "df['price'].mean()"),
    ("house_doubled", "houses", "df['price'] * 2"),
    ("house_third_price", "houses", "df['price'].iloc[3]"),
    ("house_old_renovated", "houses",
     "df[(df['yr_built'] < 1950) & (df['yr_renovated'] > 0)].shape[0]"),
    ("house_frame_mean", "houses", "df.mean()",
     "df.mean(numeric_only=True).reset_index(name='mean')"),
    ("staff_clean_names", "staff", "df['Name'].str.strip()"),
    ("staff_emails", "staff", "df['Email'].str.strip().str.lower()"),
    ("staff_domain", "staff", "df['Email'].str.lower().str.split('@').str[1]"),
    ("staff_payroll", "staff", "df['Salary'].sum()"),
    ("staff_frame_count", "staff", "df.count()", "df.count().reset_index(name='count')"),
    ("staff_joined_year", "staff", "df['Joined'].dt.year >= 2020"),
    ("staff_name_words", "staff", "df['Name'].str.split()"),
    ("scores_transpose", "scores", "df.T", "df.T.reset_index()"),
    ("scores_frame_sum", "scores", "df.sum()",
     "df.sum(numeric_only=True).reset_index(name='sum')"),
    ("scores_total", "scores", "df['Points'] + df['Bonus'] * 2"),
]

MONTHS = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]
NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def parse_date(text):
    m = re.fullmatch(r"(\d{1,2})/(\d{1,2})/(\d{2})", text)
    if m:
        yy = int(m.group(3))
        year = 1900 + yy if yy >= 30 else 2000 + yy
        return dt.date(year, int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"([A-Z][a-z]{2}) (\d{1,2}) (\d{4})", text)
    if m and m.group(1) in MONTHS:
        return dt.date(int(m.group(3)), MONTHS.index(m.group(1)) + 1, int(m.group(2)))
    return None


def load_frame(path):
    raw = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=False)
    out = {}
    for name in raw.columns:
        cells = list(raw[name])
        present = [c for c in cells if c != ""]
        if present and all(NUMBER.match(c) for c in present):
            out[name] = pd.Series([float(c) if c else np.nan for c in cells], dtype="float64")
        elif present and all(c.lower() in ("true", "false") for c in present):
            out[name] = pd.Series([None if not c else c.lower() == "true" for c in cells], dtype="object")
        elif present and all(parse_date(c) for c in present):
            out[name] = pd.to_datetime(pd.Series([parse_date(c) if c else None for c in cells]))
        else:
            out[name] = pd.Series([c if c else np.nan for c in cells], dtype="object")
    return pd.DataFrame(out)


def cell(v):
    if v is None:
        return None
    if isinstance(v, (list, tuple)):
        return [cell(x) for x in v]
    if isinstance(v, (pd.Timestamp, dt.datetime, dt.date, np.datetime64)):
        ts = pd.Timestamp(v)
        return None if pd.isna(ts) else {"date": ts.date().isoformat()}
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, float, np.integer, np.floating)):
        f = float(v)
        return None if math.isnan(f) or math.isinf(f) else f
    if isinstance(v, str):
        return v
    if pd.isna(v):
        return None
    raise TypeError(f"unsupported cell {v!r}")


def display(v):
    # Text rendering used when a transpose mixes column types.
    c = cell(v)
    if c is None:
        return None
    if isinstance(c, bool):
        return "TRUE" if c else "FALSE"
    if isinstance(c, float):
        return str(int(c)) if c.is_integer() and abs(c) < 1e15 else repr(c)
    if isinstance(c, dict):
        return c["date"]
    return c


def column_json(name, values):
    cells = [cell(v) for v in values]
    kind = "Number"
    is_list = False
    for c in cells:
        if c is None:
            continue
        if isinstance(c, list):
            is_list = True
            c = next((x for x in c if x is not None), "")
        kind = {bool: "Bool", float: "Number", str: "Text", dict: "Date"}[type(c)]
        break
    return {"name": str(name), "type": kind, "list": is_list, "cells": cells}


def frame_json(frame, mixed_as_text=False):
    cols = []
    for name in frame.columns:
        values = list(frame[name])
        if mixed_as_text and name != "index":
            values = [display(v) for v in values]
        cols.append(column_json(name, values))
    return cols


def run_pandas(table_path, code):
    df = load_frame(table_path)
    before = list(df.columns)
    tree = ast.parse(code)
    env = {"df": df, "pd": pd, "np": np}
    last = tree.body[-1]
    body = tree.body[:-1] if isinstance(last, ast.Expr) else tree.body
    exec(compile(ast.Module(body=body, type_ignores=[]), "<case>", "exec"), env)
    df = env["df"]
    if not isinstance(last, ast.Expr):
        created = [c for c in df.columns if c not in before]
        return {"shape": "NewColumns", "columns": [column_json(c, df[c]) for c in created]}
    result = eval(compile(ast.Expression(last.value), "<case>", "eval"), env)
    if isinstance(result, tuple):
        return {"shape": "SingleValue", "value": cell(list(result))}
    if isinstance(result, pd.Series):
        full = result.index.equals(pd.RangeIndex(len(df)))
        col = column_json(result.name if result.name is not None else "result", result)
        return {"shape": "NewColumns" if full else "NewTable", "columns": [col]}
    if isinstance(result, pd.DataFrame):
        return {"shape": "NewTable", "columns": frame_json(result, mixed_as_text="index" in result.columns
                                                            and code.endswith(".T.reset_index()"))}
    return {"shape": "SingleValue", "value": cell(result)}


def number_csv(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


def write_expected(case_dir, out):
    # Plain number/bool columns go to expected.csv; everything else to JSON.
    cols = out.get("columns")
    if cols and all(c["type"] in ("Number", "Bool") and not c["list"] for c in cols) \
            and all(any(x is not None for x in c["cells"]) for c in cols):
        lines = [",".join(c["name"] for c in cols)]
        for i in range(len(cols[0]["cells"])):
            row = ",".join(number_csv(c["cells"][i]) for c in cols)
            # A lone empty field would read back as a blank line.
            lines.append(row if row else '""')
        (case_dir / "expected.csv").write_text("\n".join(lines) + "\n")
        if out["shape"] == "NewTable":
            (case_dir / "expected.json").write_text('{"shape": "NewTable"}\n')
        return
    (case_dir / "expected.json").write_text(json.dumps(out, indent=1, ensure_ascii=False) + "\n")


def explain(nl2grid, code, table):
    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as f:
        f.write(code + "\n")
    try:
        res = subprocess.run([nl2grid, "explain", "--code", f.name, "--table", str(table)],
                             capture_output=True, text=True)
    finally:
        Path(f.name).unlink()
    if res.returncode != 0:
        sys.exit(f"explain failed for {code!r}: {res.stderr.strip()}")
    return res.stdout.strip()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nl2grid", default=str(ROOT / "build" / "tools" / "nl2grid"))
    ap.add_argument("--out", default=str(ROOT / "tests" / "corpus"))
    args = ap.parse_args()
    out_dir = Path(args.out)
    if out_dir.exists():
        shutil.rmtree(out_dir)
    out_dir.mkdir(parents=True)
    for case in CASES:
        cid, fixture, code = case[:3]
        oracle = case[3] if len(case) > 3 else code
        table = FIXTURES / f"{fixture}.csv"
        d = out_dir / cid
        d.mkdir()
        shutil.copy(table, d / "table.csv")
        (d / "code.txt").write_text(code + "\n")
        (d / "query.txt").write_text(explain(args.nl2grid, code, table) + "\n")
        write_expected(d, run_pandas(table, oracle))
    print(f"wrote {len(CASES)} cases to {out_dir}")


if __name__ == "__main__":
    main()
