"""Benchmark harness: timed worker pools, sampling, CSV output."""

from __future__ import annotations

import csv
import random
import threading
import time
from pathlib import Path

from ..schemes import make_scheme
from .config import EFFICIENCY_FIELDS, THROUGHPUT_FIELDS, BenchConfig
from .workloads import build_structure, make_op, ops_per_region


def append_rows(path, fields, rows) -> None:
    """Append rows to a CSV file, writing the header only when empty."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(fields)
        writer.writerows(rows)


def _spawn_workers(cfg: BenchConfig, scheme, structure, stop, barrier, salt: int):
    """Start cfg.threads workers; returns (threads, results, errors)."""
    results: list = [None] * cfg.threads
    errors: list = []
    span = ops_per_region(cfg)

    def worker(tid: int) -> None:
        rng = random.Random(cfg.seed * 7919 + salt * 613 + tid)
        cell = scheme.counters.cell()
        op = make_op(cfg, structure, rng)
        ops = 0
        started = ended = 0
        try:
            barrier.wait()
            started = time.perf_counter_ns()
            while not stop.is_set():
                with scheme.region():
                    for _ in range(span):
                        ops += op()
            ended = time.perf_counter_ns()
        except BaseException as exc:  # surface worker crashes to the caller
            stop.set()
            errors.append(exc)
            if ended == 0:
                ended = time.perf_counter_ns()
        finally:
            cell.ops += ops
            results[tid] = (ops, max(ended - started, 1))
            try:
                scheme.on_thread_exit()
            except BaseException as exc:
                errors.append(exc)

    threads = [
        threading.Thread(target=worker, args=(tid,), name=f"bench-{tid}", daemon=True)
        for tid in range(cfg.threads)
    ]
    for t in threads:
        t.start()
    return threads, results, errors


def run_throughput(cfg: BenchConfig) -> list[tuple]:
    """Per-thread ops/runtime rows over cfg.trials independent trials."""
    rows: list[tuple] = []
    for trial in range(cfg.trials):
        scheme = make_scheme(cfg.scheme)
        structure = build_structure(cfg, scheme)
        stop = threading.Event()
        barrier = threading.Barrier(cfg.threads + 1)
        threads, results, errors = _spawn_workers(cfg, scheme, structure, stop, barrier, trial)
        barrier.wait()
        time.sleep(cfg.trial_seconds)
        stop.set()
        for t in threads:
            t.join()
        if errors:
            raise errors[0]
        for tid, (ops, runtime_ns) in enumerate(results):
            rows.append(
                (
                    cfg.benchmark,
                    cfg.scheme,
                    cfg.threads,
                    trial,
                    tid,
                    ops,
                    runtime_ns,
                    round(runtime_ns / max(ops, 1), 3),
                )
            )
        structure.dispose()
        scheme.quiesce()
    return rows


def run_efficiency(cfg: BenchConfig) -> list[tuple]:
    """Unreclaimed/allocated/reclaimed samples.

    Per run: one fresh scheme and structure shared by cfg.trials trials.
    Per trial: samples-1 periodic snapshots while workers run, then one
    post-join snapshot.  The final snapshot of a run's last trial is taken
    after dispose() and quiesce(), so it reports the scheme's floor.
    """
    rows: list[tuple] = []
    interval = cfg.trial_seconds / cfg.samples
    for run in range(cfg.runs):
        scheme = make_scheme(cfg.scheme)
        structure = build_structure(cfg, scheme)
        for trial in range(cfg.trials):
            stop = threading.Event()
            barrier = threading.Barrier(cfg.threads + 1)
            threads, _results, errors = _spawn_workers(
                cfg, scheme, structure, stop, barrier, run * cfg.trials + trial
            )
            barrier.wait()

            def snap(sample: int) -> None:
                totals = scheme.counters.totals()
                rows.append(
                    (
                        cfg.benchmark,
                        cfg.scheme,
                        cfg.threads,
                        run,
                        trial,
                        sample,
                        totals.unreclaimed,
                        totals.allocated,
                        totals.reclaimed,
                    )
                )

            for sample in range(cfg.samples - 1):
                time.sleep(interval)
                snap(sample)
            time.sleep(interval)
            stop.set()
            for t in threads:
                t.join()
            if errors:
                raise errors[0]
            if trial == cfg.trials - 1:
                structure.dispose()
                scheme.quiesce()
            snap(cfg.samples - 1)
    return rows


def run(cfg: BenchConfig, out=None) -> tuple[list[tuple], Path]:
    """Run one configuration and append its rows to a CSV file."""
    if cfg.mode == "throughput":
        rows = run_throughput(cfg)
        fields = THROUGHPUT_FIELDS
        default = "throughput.csv"
    else:
        rows = run_efficiency(cfg)
        fields = EFFICIENCY_FIELDS
        default = "efficiency.csv"
    path = Path(out) if out is not None else Path(default)
    append_rows(path, fields, rows)
    return rows, path
