"""Workload definitions shared by both benchmark modes.

Each workload provides a structure factory and a per-thread operation
closure.  The closure performs one unit of work and returns the number of
structure accesses it made, so the harness can account ops uniformly.
"""

from __future__ import annotations

import random

from ..structures import FifoBoundedHashMap, LockFreeSortedList, MichaelScottQueue
from .config import BenchConfig

QUEUE_PREFILL = 128


def build_structure(cfg: BenchConfig, scheme):
    """Create and prefill the benchmark structure on the calling thread."""
    if cfg.benchmark == "queue":
        q = MichaelScottQueue(scheme)
        with scheme.region():
            for i in range(QUEUE_PREFILL):
                q.enqueue(i)
        return q
    if cfg.benchmark == "list":
        lst = LockFreeSortedList(scheme)
        with scheme.region():
            # 50% occupancy: every even key present
            for key in range(0, cfg.list_size, 2):
                lst.insert(key, key)
        return lst
    if cfg.benchmark == "hashmap":
        return FifoBoundedHashMap(scheme, buckets=cfg.buckets, capacity=cfg.capacity)
    raise ValueError(cfg.benchmark)


def make_op(cfg: BenchConfig, structure, rng: random.Random):
    """Return ``op() -> int`` performing one unit of work."""
    if cfg.benchmark == "queue":
        queue = structure

        def queue_op() -> int:
            if rng.getrandbits(1):
                queue.enqueue(rng.getrandbits(30))
            else:
                queue.dequeue()
            return 1

        return queue_op

    if cfg.benchmark == "list":
        lst = structure
        update = cfg.update_percent
        half = update // 2
        size = cfg.list_size

        def list_op() -> int:
            r = rng.randrange(100)
            key = rng.randrange(size)
            if r < half:
                lst.insert(key, key)
            elif r < update:
                lst.remove(key)
            else:
                lst.contains(key)
            return 1

        return list_op

    if cfg.benchmark == "hashmap":
        hmap = structure
        draws = cfg.draws_per_step
        catalog = cfg.catalog_size
        nbytes = cfg.payload_bytes

        def compute(_key):
            return bytearray(nbytes)

        def hashmap_op() -> int:
            for _ in range(draws):
                hmap.get_or_compute(rng.randrange(catalog), compute)
            return draws

        return hashmap_op

    raise ValueError(cfg.benchmark)


def ops_per_region(cfg: BenchConfig) -> int:
    """Units of work batched under one explicit region.

    ``region_span`` is denominated in structure accesses; a hashmap step
    already makes ``draws_per_step`` accesses, so steps are batched until
    the span is covered.
    """
    if cfg.benchmark == "hashmap":
        return max(1, cfg.region_span // cfg.draws_per_step)
    return max(1, cfg.region_span)
