"""Randomized multi-threaded stress with canary checks and invariant sweeps.

Workers hammer one structure with a seeded operation mix.  Every guarded
dereference inside the structures asserts the canary, so any premature
reclamation surfaces as a recorded violation.  At fixed operation counts
all workers meet at a barrier and one of them sweeps structure and pool
invariants while everything is quiescent; the sweep points are the same
in every worker, so barrier participation always balances.

``mutate_slack`` wires the deliberately-broken reclamation predicate
into the stamp scheme (reclaim bound widened by that many stamp units);
one stamp increment of slack must make the canaries bite, which is the
sensitivity check for the whole apparatus.
"""
from __future__ import annotations

import random
import sys
import threading
import time
from dataclasses import dataclass, field

from stampit.canary import ALIVE, CanaryViolation
from stampit.interface import CounterTotals
from stampit.pool import FLAG_MASK, NOT_IN_LIST, block_state
from stampit.schemes import make_scheme
from stampit.schemes.stamp import StampItScheme
from stampit.structures import FifoBoundedHashMap, LockFreeSortedList, MichaelScottQueue


@dataclass
class StressConfig:
    scheme: str = "stamp-it"
    structure: str = "queue"
    threads: int = 4
    ops_per_thread: int = 50_000
    seed: int = 1
    key_space: int = 256
    prefill: int = 64
    region_span: int = 100
    sweeps: int = 4
    mutate_slack: int = 0
    stop_on_violation: bool = False


@dataclass
class StressReport:
    violations: list = field(default_factory=list)
    sweep_failures: list = field(default_factory=list)
    ops: int = 0
    acquisitions: int = 0
    totals: CounterTotals | None = None
    runtime_s: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.sweep_failures


def _make_structure(name, scheme, cfg):
    if name == "queue":
        return MichaelScottQueue(scheme)
    if name == "list":
        return LockFreeSortedList(scheme)
    if name == "hashmap":
        return FifoBoundedHashMap(scheme, buckets=64, capacity=max(cfg.key_space // 2, 8))
    raise ValueError(f"unknown structure {name!r}")


def _queue_op(struct, rng, _cfg):
    if rng.random() < 0.5:
        struct.enqueue(rng.randrange(1 << 30))
    else:
        struct.dequeue()


def _list_op(struct, rng, cfg):
    r = rng.random()
    key = rng.randrange(cfg.key_space)
    if r < 0.4:
        struct.insert(key)
    elif r < 0.8:
        struct.remove(key)
    else:
        struct.contains(key)


def _hashmap_op(struct, rng, cfg):
    key = rng.randrange(cfg.key_space)
    if rng.random() < 0.8:
        struct.get_or_compute(key, lambda k: ("payload", k))
    else:
        struct.remove(key)


_OPS = {"queue": _queue_op, "list": _list_op, "hashmap": _hashmap_op}


# -- quiescent sweeps ---------------------------------------------------------


def _sweep(cfg, scheme, struct, failures):
    try:
        if cfg.structure == "list":
            _sweep_list(struct)
        elif cfg.structure == "queue":
            _sweep_queue(struct, cfg)
        elif cfg.structure == "hashmap":
            if struct.size() > struct.capacity:
                raise AssertionError(
                    f"hashmap size {struct.size()} exceeds capacity {struct.capacity} at quiescence"
                )
        if isinstance(scheme, StampItScheme) and cfg.mutate_slack == 0:
            _sweep_pool(scheme.pool)
    except Exception as exc:  # recorded, run continues
        failures.append(repr(exc))


def _sweep_list(struct):
    node = struct._head.load().obj
    prev_key = None
    while node is not None:
        if node.magic != ALIVE:
            raise AssertionError("reclaimed node linked in list at quiescence")
        link = node.next.load()
        if link.mk != 0:
            raise AssertionError("delete-marked node left linked at quiescence")
        if prev_key is not None and node.key <= prev_key:
            raise AssertionError("list keys not strictly increasing")
        prev_key = node.key
        node = link.obj


def _sweep_queue(struct, cfg):
    node = struct._head.load().obj
    seen = 0
    limit = cfg.threads * cfg.ops_per_thread + cfg.prefill + 2
    while node is not None:
        if node.magic != ALIVE:
            raise AssertionError("reclaimed node linked in queue at quiescence")
        node = node.next.load().obj
        seen += 1
        if seen > limit:
            raise AssertionError("queue chain does not terminate")


def _sweep_pool(pool):
    stamps = []
    for block in pool.blocks():
        if block.index <= 1:
            continue
        state = block_state(block)
        if state is None:
            raise AssertionError(f"block {block.index} in impossible state")
        stamp = block.stamp.load()
        if not stamp & NOT_IN_LIST:
            stamps.append(stamp & ~FLAG_MASK)
    if len(set(stamps)) != len(stamps):
        raise AssertionError("duplicate stamps among linked blocks")
    low = pool.lowest_stamp()
    if stamps and min(stamps) < low:
        raise AssertionError("tail stamp exceeds a linked block's stamp")


# -- the run -------------------------------------------------------------------


def stress_run(cfg: StressConfig) -> StressReport:
    scheme = make_scheme(cfg.scheme)
    if cfg.mutate_slack:
        if not isinstance(scheme, StampItScheme):
            raise ValueError("mutate_slack applies to the stamp scheme only")
        scheme.reclaim_slack = cfg.mutate_slack
    struct = _make_structure(cfg.structure, scheme, cfg)
    op = _OPS[cfg.structure]
    report = StressReport()
    stop = threading.Event()
    lock = threading.Lock()

    rng = random.Random(cfg.seed)
    with scheme.region():
        for _ in range(cfg.prefill):
            if cfg.structure == "queue":
                struct.enqueue(rng.randrange(1 << 30))
            elif cfg.structure == "list":
                struct.insert(rng.randrange(cfg.key_space))
            else:
                struct.get_or_compute(rng.randrange(cfg.key_space), lambda k: ("payload", k))

    chunk = max(cfg.ops_per_thread // max(cfg.sweeps, 1), 1)
    barrier = threading.Barrier(
        cfg.threads, action=lambda: _sweep(cfg, scheme, struct, report.sweep_failures)
    )

    def worker(tid: int) -> None:
        wrng = random.Random(cfg.seed * 1000 + tid)
        cell = scheme.counters.cell()
        done = 0
        next_sweep = chunk
        try:
            while done < cfg.ops_per_thread and not stop.is_set():
                span = min(cfg.region_span, cfg.ops_per_thread - done)
                with scheme.region():
                    for _ in range(span):
                        try:
                            op(struct, wrng, cfg)
                        except CanaryViolation as exc:
                            with lock:
                                report.violations.append((tid, done, repr(exc)))
                            if cfg.stop_on_violation:
                                stop.set()
                        cell.ops += 1
                        done += 1
                # sweep points fall at the same op counts in every worker
                while next_sweep <= done and next_sweep < cfg.ops_per_thread:
                    next_sweep += chunk
                    if stop.is_set():
                        break
                    try:
                        barrier.wait(timeout=300)
                    except threading.BrokenBarrierError:
                        break
        except BaseException as exc:
            stop.set()
            with lock:
                report.sweep_failures.append(f"worker crash: {exc!r}")
        finally:
            if stop.is_set():
                barrier.abort()
            try:
                scheme.on_thread_exit()
            except Exception as exc:
                # guards leak when a canary fires mid-operation; only
                # noteworthy if nothing else went wrong
                if not report.violations:
                    with lock:
                        report.sweep_failures.append(f"thread exit: {exc!r}")

    old_interval = sys.getswitchinterval()
    sys.setswitchinterval(1e-5)
    start = time.perf_counter()
    threads = [threading.Thread(target=worker, args=(t,)) for t in range(cfg.threads)]
    try:
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    finally:
        sys.setswitchinterval(old_interval)
    report.runtime_s = time.perf_counter() - start
    totals = scheme.counters.totals()
    report.ops = totals.ops
    report.acquisitions = totals.acquisitions
    report.totals = totals
    return report
