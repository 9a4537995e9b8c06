#!/usr/bin/env python3
"""Run every experiment suite with its defaults and collect CSV reports.

Usage: python3 scripts/run_all_suites.py [outdir] [--seed S]

Writes one report per suite into outdir (default ./out) and prints a
one-line verdict each.  Exits non-zero if any suite fails.
"""

import argparse
import pathlib
import sys
import time

from besov_tree.suites import SUITE_NAMES, ExperimentConfig, emit_report, run_suite


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default="out")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in SUITE_NAMES:
        t0 = time.perf_counter()
        result = run_suite(ExperimentConfig(suite=name, seed=args.seed))
        path = outdir / f"{name}.csv"
        emit_report(result, path)
        verdict = "PASS" if result.passed else "FAIL"
        print(f"{name:16s} {verdict}  rows={len(result.rows):5d}  "
              f"{time.perf_counter() - t0:6.1f}s  -> {path}")
        failures += 0 if result.passed else 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
