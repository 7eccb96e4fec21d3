"""Command line entry point: ``bench``."""

from __future__ import annotations

import argparse
import sys

from ..schemes import SCHEME_NAMES
from .config import BENCHMARK_NAMES, MODE_NAMES, BenchConfig
from .harness import run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bench",
        description="Run one benchmark configuration and append rows to a CSV file.",
    )
    p.add_argument("--benchmark", choices=BENCHMARK_NAMES, default="queue")
    p.add_argument("--scheme", choices=SCHEME_NAMES, default="stamp-it")
    p.add_argument("--mode", choices=MODE_NAMES, default="throughput")
    p.add_argument("--threads", type=int, default=2)
    p.add_argument("--trial-seconds", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--runs", type=int, default=3, help="efficiency mode only")
    p.add_argument("--samples", type=int, default=50, help="per trial, incl. final")
    p.add_argument("--region-span", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument(
        "--workload", type=int, default=20, help="percent of list ops that mutate"
    )
    p.add_argument("--list-size", type=int, default=1024)
    p.add_argument("--draws", type=int, default=100, help="hashmap draws per step")
    p.add_argument("--catalog", type=int, default=3000, help="hashmap key universe")
    p.add_argument("--payload-bytes", type=int, default=256)
    p.add_argument("--capacity", type=int, default=1000, help="hashmap FIFO bound")
    p.add_argument("--buckets", type=int, default=2048)
    p.add_argument("--out", default=None, help="CSV path (default <mode>.csv)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = BenchConfig(
        benchmark=args.benchmark,
        scheme=args.scheme,
        mode=args.mode,
        threads=args.threads,
        trial_seconds=args.trial_seconds,
        trials=args.trials,
        runs=args.runs,
        samples=args.samples,
        region_span=args.region_span,
        seed=args.seed,
        update_percent=args.workload,
        list_size=args.list_size,
        draws_per_step=args.draws,
        catalog_size=args.catalog,
        payload_bytes=args.payload_bytes,
        capacity=args.capacity,
        buckets=args.buckets,
    )
    rows, path = run(cfg, out=args.out)
    print(
        f"{cfg.mode}: {cfg.benchmark}/{cfg.scheme} at {cfg.threads} threads, "
        f"{len(rows)} rows -> {path}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
