"""Hazard-pointer reclamation with dynamically growing per-thread slots.

Every guard publishes its target in a slot visible to all threads and
revalidates the source afterwards, so protection is per-node rather than
per-region.  A thread scans once its retire list exceeds a threshold
that scales with the total number of published slots: the base value
plus twice the slots of every registered thread.  Scans steal the global
list of leftovers from exited threads, free every candidate that no slot
protects, and re-park the rest.
"""
from __future__ import annotations

import threading

from stampit.interface import (
    AtomicRef,
    ConcurrentReference,
    Guard,
    GuardContractError,
    MarkedReference,
    Reclaimer,
    RetiredNode,
)


class _Slot:
    __slots__ = ("value", "owner")

    def __init__(self, owner):
        self.value = None
        self.owner = owner


class _HpState:
    __slots__ = ("slots", "free", "retired", "cell", "live")

    def __init__(self, cell):
        self.slots: list[_Slot] = []
        self.free: list[_Slot] = []
        self.retired: list[RetiredNode] = []
        self.cell = cell
        self.live = True


class _Batch:
    __slots__ = ("nodes", "next")

    def __init__(self, nodes):
        self.nodes = nodes
        self.next = None


class HazardPointerScheme(Reclaimer):
    name = "hpr"

    def __init__(self, base_threshold: int = 100):
        super().__init__()
        self.base_threshold = base_threshold
        self._tls = threading.local()
        self._lock = threading.Lock()
        self._states: list[_HpState] = []
        self._global = AtomicRef(None)
        self.peak_threshold = base_threshold
        self.peak_threads = 0

    def _state(self) -> _HpState:
        st = getattr(self._tls, "st", None)
        if st is None:
            st = _HpState(self.counters.cell())
            with self._lock:
                self._states.append(st)
                self.peak_threads = max(self.peak_threads, len(self._states))
            self._tls.st = st
        return st

    # -- regions are a no-op for hazard pointers ----------------------------

    def region(self):
        from stampit.interface import _NullRegionGuard

        return _NullRegionGuard()

    def enter_region(self) -> None:
        pass

    def leave_region(self) -> None:
        pass

    # -- slots ------------------------------------------------------------

    def _grab_slot(self, st: _HpState) -> _Slot:
        if st.free:
            return st.free.pop()
        slot = _Slot(st)
        st.slots.append(slot)
        return slot

    def _release_slot(self, slot: _Slot) -> None:
        slot.value = None
        slot.owner.free.append(slot)

    def slot_count(self) -> int:
        with self._lock:
            return sum(len(s.slots) for s in self._states if s.live)

    def threshold(self) -> int:
        t = self.base_threshold + 2 * self.slot_count()
        if t > self.peak_threshold:
            self.peak_threshold = t
        return t

    # -- guarded acquisition ---------------------------------------------------

    def acquire(self, src: ConcurrentReference) -> Guard:
        st = self._state()
        st.cell.acquisitions += 1
        guard = Guard(self)
        value = src.load()
        if value.obj is None:
            guard._target = value
            return guard
        slot = self._grab_slot(st)
        while True:
            slot.value = value.obj
            check = src.load()
            if check.obj is value.obj:
                guard._slot = slot
                guard._target = check
                return guard
            if check.obj is None:
                self._release_slot(slot)
                guard._target = check
                return guard
            value = check

    def acquire_if_equal(
        self, src: ConcurrentReference, expected: MarkedReference
    ) -> tuple[bool, Guard]:
        st = self._state()
        st.cell.acquisitions += 1
        guard = Guard(self)
        if expected.obj is None:
            value = src.load()
            if value.obj is None and value.mk == expected.mk:
                guard._target = value
                return True, guard
            return False, guard
        slot = self._grab_slot(st)
        slot.value = expected.obj
        value = src.load()
        if value.obj is expected.obj and value.mk == expected.mk:
            guard._slot = slot
            guard._target = value
            return True, guard
        self._release_slot(slot)
        return False, guard

    # -- retirement ------------------------------------------------------------

    def retire(self, payload, deleter) -> None:
        st = self._state()
        st.retired.append(RetiredNode(payload, deleter, 0))
        if len(st.retired) > self.threshold():
            self._scan(st)

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

    def _scan(self, st: _HpState) -> None:
        with self._lock:
            states = list(self._states)
        protected = set()
        for s in states:
            for slot in s.slots:
                value = slot.value
                if value is not None:
                    protected.add(id(value))
        cell = st.cell
        keep = []
        for node in st.retired:
            cell.scan_steps += 1
            if id(node.payload) in protected:
                keep.append(node)
            else:
                node.deleter(node.payload)
                cell.reclaimed += 1
        st.retired = keep
        stolen = self._take_all()
        if stolen:
            keep_global = []
            for nodes in stolen:
                for node in nodes:
                    cell.scan_steps += 1
                    if id(node.payload) in protected:
                        keep_global.append(node)
                    else:
                        node.deleter(node.payload)
                        cell.reclaimed += 1
            if keep_global:
                self._push_batch(keep_global)

    # -- lifecycle ---------------------------------------------------------------

    def on_thread_exit(self) -> None:
        st = self._state()
        if any(slot.value is not None for slot in st.slots):
            raise GuardContractError("thread exit with live hazard slots")
        self._scan(st)
        if st.retired:
            self._push_batch(st.retired)
            st.retired = []
        st.live = False
        with self._lock:
            self._states.remove(st)
        self._tls.st = None

    def quiesce(self) -> None:
        self._scan(self._state())

    def retired_count(self) -> int:
        return len(self._state().retired)
