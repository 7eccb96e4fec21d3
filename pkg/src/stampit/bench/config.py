"""Benchmark configuration and CSV row schemas."""

from __future__ import annotations

from dataclasses import dataclass

from stampit.schemes import SCHEME_NAMES

BENCHMARK_NAMES = ("queue", "list", "hashmap")
MODE_NAMES = ("throughput", "efficiency")

THROUGHPUT_FIELDS = (
    "benchmark",
    "scheme",
    "threads",
    "trial",
    "thread_id",
    "ops",
    "runtime_ns",
    "ns_per_op",
)

EFFICIENCY_FIELDS = (
    "benchmark",
    "scheme",
    "threads",
    "run",
    "trial",
    "sample",
    "unreclaimed",
    "allocated",
    "reclaimed",
)


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark invocation.

    ``region_span`` counts individual structure accesses per explicit
    region; workloads whose unit of work touches the structure many times
    (the hashmap simulation step) open a region per unit instead of
    batching ``region_span`` units.
    """

    benchmark: str = "queue"
    scheme: str = "stamp-it"
    mode: str = "throughput"
    threads: int = 2
    trial_seconds: float = 1.0
    trials: int = 5
    runs: int = 3
    samples: int = 50
    region_span: int = 100
    seed: int = 1
    # list workload: percent of ops that mutate, over this key range
    update_percent: int = 20
    list_size: int = 1024
    # hashmap workload: one step draws this many keys from the catalog
    draws_per_step: int = 100
    catalog_size: int = 3000
    payload_bytes: int = 256
    capacity: int = 1000
    buckets: int = 2048

    def __post_init__(self):
        if self.benchmark not in BENCHMARK_NAMES:
            raise ValueError(f"unknown benchmark {self.benchmark!r}")
        if self.scheme not in SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.mode not in MODE_NAMES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.trial_seconds <= 0:
            raise ValueError("trial_seconds must be positive")
        if self.trials < 1 or self.runs < 1:
            raise ValueError("trials and runs must be >= 1")
        if self.samples < 2:
            raise ValueError("samples must be >= 2 (periodic plus final)")
        if self.region_span < 1:
            raise ValueError("region_span must be >= 1")
        if not 0 <= self.update_percent <= 100:
            raise ValueError("update_percent must be in [0, 100]")
