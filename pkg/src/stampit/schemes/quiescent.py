"""Quiescent-state reclamation driven by a fuzzy barrier.

Threads announce a checkpoint whenever they leave their outermost
region.  A global round counter advances once every registered thread
has announced the current round; nobody ever blocks, a thread simply
contributes its announcement and moves on.  A node retired during round
`r` becomes reclaimable when the round reaches `r + 2`: every thread has
then passed a checkpoint that started after the retirement.

Reclamation is blocking on barrier completion by design: one registered
thread that never checkpoints stalls the round, and with it every
retired node, forever.
"""
from __future__ import annotations

import threading

from stampit.interface import AtomicInt, AtomicRef, GuardContractError, RetiredNode
from stampit.schemes.base import RegionReclaimer


class _QsrState:
    __slots__ = ("depth", "passed", "buckets", "tag_counts", "cell")

    def __init__(self, cell, round_: int):
        self.depth = 0
        # has not yet announced the current round
        self.passed = round_ - 1
        self.buckets: dict[int, list] = {}
        self.tag_counts: dict[int, int] = {}
        self.cell = cell


class _Batch:
    __slots__ = ("nodes", "next")

    def __init__(self, nodes):
        self.nodes = nodes
        self.next = None


class QuiescentStateScheme(RegionReclaimer):
    name = "qsr"

    def __init__(self):
        super().__init__()
        self._round = AtomicInt(0)
        self._lock = threading.Lock()
        self._registry: list[_QsrState] = []
        self._parked: list[_QsrState] = []
        self._global = AtomicRef(None)

    def _new_state(self):
        st = _QsrState(self.counters.cell(), self._round.load())
        with self._lock:
            self._registry.append(st)
        return st

    # -- region boundaries --------------------------------------------------

    def _outermost_enter(self, st) -> None:
        pass

    def _outermost_leave(self, st) -> None:
        self.checkpoint(st)

    def checkpoint(self, st=None) -> None:
        """Announce a quiescent point and reclaim whatever became safe."""
        if st is None:
            st = self._state()
        round_ = self._round.load()
        st.passed = round_
        with self._lock:
            registry = list(self._registry)
        if all(rec.passed >= round_ for rec in registry):
            self._round.compare_and_set(round_, round_ + 1)
        self._flush(st)

    def round(self) -> int:
        return self._round.load()

    # -- retirement ------------------------------------------------------------

    def retire(self, payload, deleter) -> None:
        st = self._state()
        if st.depth < 1:
            raise GuardContractError("retire outside a region")
        tag = self._round.load()
        st.buckets.setdefault(tag, []).append(RetiredNode(payload, deleter, tag))
        st.tag_counts[tag] = st.tag_counts.get(tag, 0) + 1

    def _flush(self, st) -> None:
        bound = self._round.load() - 2
        cell = st.cell
        stale = [tag for tag in st.buckets if tag <= bound]
        for tag in stale:
            nodes = st.buckets.pop(tag)
            for node in nodes:
                node.deleter(node.payload)
                cell.reclaimed += 1
            cell.scan_steps += len(nodes)
        self._steal(st, bound)

    def _steal(self, st, bound: int) -> None:
        if self._global.load() is None:
            return
        batches = self._take_all()
        if not batches:
            return
        cell = st.cell
        keep = []
        for nodes in batches:
            for node in nodes:
                cell.scan_steps += 1
                if node.stamp <= bound:
                    node.deleter(node.payload)
                    cell.reclaimed += 1
                else:
                    keep.append(node)
        if keep:
            self._push_batch(keep)

    def _take_all(self):
        while True:
            head = self._global.load()
            if head is None:
                return []
            if self._global.compare_and_set(head, None):
                batches = []
                batch = head
                while batch is not None:
                    batches.append(batch.nodes)
                    batch = batch.next
                return batches

    def _push_batch(self, nodes) -> None:
        batch = _Batch(nodes)
        while True:
            head = self._global.load()
            batch.next = head
            if self._global.compare_and_set(head, batch):
                return

    # -- lifecycle ------------------------------------------------------------------

    def on_thread_exit(self) -> None:
        st = self._state()
        if st.depth != 0:
            raise GuardContractError("thread exit inside a region")
        leftovers = []
        for nodes in st.buckets.values():
            leftovers.extend(nodes)
        st.buckets.clear()
        if leftovers:
            self._push_batch(leftovers)
        with self._lock:
            self._registry.remove(st)
            self._parked.append(st)
        self._tls.st = None

    def quiesce(self) -> None:
        for _ in range(3):
            self.enter_region()
            self.leave_region()

    def retired_in_last_two_rounds(self) -> int:
        round_ = self._round.load()
        with self._lock:
            states = list(self._registry) + list(self._parked)
        total = 0
        for st in states:
            for tag, count in st.tag_counts.items():
                if tag >= round_ - 1:
                    total += count
        return total
