#!/usr/bin/env python3
"""Run every suite at its reference parameters under one master seed.

Writes CSVs and meta sidecars to --out and prints one PASS/FAIL line per
report row plus a final summary. Reference parameters match the
acceptance test; expect a few minutes total, dominated by the threshold
and condenser suites.
"""

from __future__ import annotations

import argparse
import sys
import time

from entrolab.harness import ExperimentConfig, run_suite
from entrolab.harness.report import write_csv, write_meta
from pathlib import Path


def reference_configs(seed: int, out: str) -> list[ExperimentConfig]:
    return [
        ExperimentConfig(kind="predictor", seed=seed, out=out, instances=20, mc_trials=100_000),
        ExperimentConfig(kind="optimizer", seed=seed, out=out, instances=50, extra={"identities": 100}),
        ExperimentConfig(kind="threshold", seed=seed, out=out, runs=1000, samples=10_000, delta=0.05),
        ExperimentConfig(kind="gprops", seed=seed, out=out),
        ExperimentConfig(kind="decoder", seed=seed, out=out, trials=200),
        ExperimentConfig(
            kind="condenser", seed=seed, out=out, n=10, k=5.0, gap=3, trials=2000, iterations=2
        ),
    ]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20260822)
    ap.add_argument("--out", default="reports")
    args = ap.parse_args()

    all_ok = True
    for cfg in reference_configs(args.seed, args.out):
        t0 = time.perf_counter()
        rows, meta = run_suite(cfg)
        dt = time.perf_counter() - t0
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{cfg.kind}-{cfg.seed}.csv"
        write_csv(rows, csv_path)
        write_meta(csv_path, meta)
        for row in rows:
            print(row.line())
        ok = all(r.passed for r in rows)
        all_ok = all_ok and ok
        print(f"-- {cfg.kind}: {len(rows)} rows, {'ok' if ok else 'FAIL'}, {dt:.1f}s -> {csv_path}")
    print("ALL SUITES PASS" if all_ok else "SOME SUITES FAILED")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
