#!/usr/bin/env python

"""

Usage:

  ./report_bounds.py <sweep.csv>

Aim:

Summarize a CSV file written by `qoc-bounds sweep`: the median
objective at each sweep value next to the information bound, and
any run that beats a bound. The exit status is 1 if there are
violations.

"""

import csv
import sys

import numpy as np

from qoc_bounds.harness import audit_csv

if len(sys.argv) != 2:
    sys.stderr.write(f"Usage: {sys.argv[0]} <sweep.csv>\n")
    sys.exit(1)

infile = sys.argv[1]
with open(infile, newline="", encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))

if len(rows) == 0:
    sys.stderr.write(f"No records in {infile}\n")
    sys.exit(1)

values = []
for row in rows:
    if row["sweep_value"] not in values:
        values.append(row["sweep_value"])

print(f"Sweep file: {infile}\n")
print("| Value      | Seeds | Median     | eps_info   | t_qsl    |")
print("| ---------- | ----- | ---------- | ---------- | -------- |")

for value in values:
    matches = [r for r in rows if r["sweep_value"] == value]
    median = np.median([float(r["best_objective"]) for r in matches])
    eps_info = max(float(r["eps_info"]) for r in matches)
    t_qsl = float(matches[0]["t_qsl"])
    print(f"| {float(value):10.4g} | {len(matches):5d} | {median:10.3e} "
          f"| {eps_info:10.3e} | {t_qsl:8.4f} |")

print("")

reasons = audit_csv(infile)
if len(reasons) == 0:
    print("No bound is violated.")
    sys.exit(0)

print(f"Number of violations: {len(reasons)}\n")
for reason in reasons:
    print(f"  {reason}")

sys.exit(1)
