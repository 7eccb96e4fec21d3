#!/usr/bin/env python3
"""Desk-scale benchmark sweep over every benchmark x scheme x thread count.

Appends to throughput.csv and efficiency.csv under --out so partial
sweeps can be resumed or extended.  The full default sweep (3 benchmarks
x 5 schemes x 4 thread counts, 5 trials of 1 s plus 3 efficiency runs)
takes on the order of 20 minutes; --quick cuts it to a smoke pass.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from stampit.bench import BENCHMARK_NAMES, MODE_NAMES, BenchConfig, run
from stampit.schemes import SCHEME_NAMES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--threads", type=int, nargs="+", default=[1, 2, 4, 8])
    parser.add_argument("--benchmarks", nargs="+", choices=BENCHMARK_NAMES, default=list(BENCHMARK_NAMES))
    parser.add_argument("--schemes", nargs="+", choices=SCHEME_NAMES, default=list(SCHEME_NAMES))
    parser.add_argument("--modes", nargs="+", choices=MODE_NAMES, default=list(MODE_NAMES))
    parser.add_argument("--trial-seconds", type=float, default=1.0)
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--runs", type=int, default=3)
    parser.add_argument("--samples", type=int, default=50)
    parser.add_argument("--region-span", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--quick", action="store_true", help="0.2 s trials, 1 trial, 1 run, 5 samples")
    args = parser.parse_args()
    if args.quick:
        args.trial_seconds, args.trials, args.runs, args.samples = 0.2, 1, 1, 5

    args.out.mkdir(parents=True, exist_ok=True)
    for benchmark in args.benchmarks:
        for scheme in args.schemes:
            for threads in args.threads:
                for mode in args.modes:
                    cfg = BenchConfig(
                        benchmark=benchmark,
                        scheme=scheme,
                        mode=mode,
                        threads=threads,
                        trial_seconds=args.trial_seconds,
                        trials=args.trials,
                        runs=args.runs,
                        samples=args.samples,
                        region_span=args.region_span,
                        seed=args.seed,
                    )
                    rows, path = run(cfg, args.out / f"{mode}.csv")
                    print(
                        f"{benchmark:>8} {scheme:>9} p={threads} {mode:<11} "
                        f"{len(rows):>4} rows -> {path}"
                    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
