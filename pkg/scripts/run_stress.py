#!/usr/bin/env python3
"""Randomized canary stress across schemes and structures.

Exit status is nonzero if any run records a canary violation or a
quiescent-sweep failure.  --mutate-slack widens the stamped scheme's
reclaim bound on purpose; run it to watch the canaries bite.
"""
from __future__ import annotations

import argparse

from stampit.schemes import SCHEME_NAMES
from stampit.verify import StressConfig, stress_run

STRUCTURES = ("queue", "list", "hashmap")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--ops", type=int, default=50_000, help="operations per thread")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--sweeps", type=int, default=4)
    parser.add_argument("--region-span", type=int, default=100)
    parser.add_argument("--schemes", nargs="+", choices=SCHEME_NAMES, default=None)
    parser.add_argument("--structures", nargs="+", choices=STRUCTURES, default=list(STRUCTURES))
    parser.add_argument(
        "--mutate-slack", type=int, default=0,
        help="extra stamp units on the reclaim bound (stamped scheme only)",
    )
    args = parser.parse_args()
    # the loosened bound is a stamped-scheme knob; other schemes reject it
    schemes = args.schemes or (["stamp-it"] if args.mutate_slack else list(SCHEME_NAMES))

    failures = 0
    for scheme in schemes:
        for structure in args.structures:
            cfg = StressConfig(
                scheme=scheme,
                structure=structure,
                threads=args.threads,
                ops_per_thread=args.ops,
                seed=args.seed,
                sweeps=args.sweeps,
                region_span=args.region_span,
                mutate_slack=args.mutate_slack,
            )
            report = stress_run(cfg)
            status = "ok" if report.ok else "FAIL"
            print(
                f"{scheme:>9}/{structure:<7} ops={report.ops:,} "
                f"acquisitions={report.acquisitions:,} "
                f"rate={report.ops / report.runtime_s:,.0f}/s {status}"
            )
            for item in report.violations[:3]:
                print(f"    violation: {item}")
            for item in report.sweep_failures[:3]:
                print(f"    sweep: {item}")
            if not report.ok:
                failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
