"""Throughput and reclamation-efficiency benchmark harness."""

from .config import (
    BENCHMARK_NAMES,
    EFFICIENCY_FIELDS,
    MODE_NAMES,
    THROUGHPUT_FIELDS,
    BenchConfig,
)
from .harness import append_rows, run, run_efficiency, run_throughput
from .workloads import build_structure, make_op, ops_per_region

__all__ = [
    "BENCHMARK_NAMES",
    "EFFICIENCY_FIELDS",
    "MODE_NAMES",
    "THROUGHPUT_FIELDS",
    "BenchConfig",
    "append_rows",
    "build_structure",
    "make_op",
    "ops_per_region",
    "run",
    "run_efficiency",
    "run_throughput",
]
