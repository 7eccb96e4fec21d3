"""Epoch-based reclamation, with implicit or explicit regions.

A global epoch counter advances only when every thread currently inside
a region has observed its latest value.  Retired nodes are tagged with
the global epoch read at retire time and become reclaimable once the
observed epoch reaches `tag + 2`: both advances past the tag required
every region that could still reference the node to have ended.  Each
thread keeps per-epoch buckets and frees the stale ones whenever it
(re)observes the epoch; an advance is attempted every ``cadence``
outermost entries.

Two personalities share this machinery:

* implicit regions (``explicit_regions=False``): ``region()`` is a
  no-op, so every guard acquisition that starts at depth zero opens its
  own short region.  Cheap entries, frequent epoch observations.
* explicit regions (``explicit_regions=True``): the caller's
  ``region()`` spans pin the observed epoch for their whole duration,
  saving per-operation entry costs at the price of coarser reclamation.
  A single thread parked inside a region stalls the epoch globally.

Exited threads park their leftover buckets on a global list that any
thread steals during its own reclamation pass.
"""
from __future__ import annotations

import threading

from stampit.interface import AtomicInt, AtomicRef, GuardContractError, RetiredNode, _NullRegionGuard
from stampit.schemes.base import RegionReclaimer


class _EpochState:
    __slots__ = ("depth", "active", "local_epoch", "entries", "buckets", "tag_counts", "cell")

    def __init__(self, cell):
        self.depth = 0
        self.active = False
        self.local_epoch = 0
        self.entries = 0
        self.buckets: dict[int, list] = {}
        self.tag_counts: dict[int, int] = {}
        self.cell = cell


class _Batch:
    __slots__ = ("nodes", "next")

    def __init__(self, nodes):
        self.nodes = nodes
        self.next = None


class EpochScheme(RegionReclaimer):
    def __init__(self, cadence: int = 100, explicit_regions: bool = False):
        super().__init__()
        self.name = "ner" if explicit_regions else "er"
        self.cadence = cadence
        self.explicit_regions = explicit_regions
        self._epoch = AtomicInt(0)
        self._lock = threading.Lock()
        self._registry: list[_EpochState] = []
        self._parked: list[_EpochState] = []  # exited, kept for accounting
        self._global = AtomicRef(None)

    def _new_state(self):
        st = _EpochState(self.counters.cell())
        with self._lock:
            self._registry.append(st)
        return st

    def region(self):
        if self.explicit_regions:
            return super().region()
        return _NullRegionGuard()

    # -- region boundaries ---------------------------------------------------

    def _outermost_enter(self, st) -> None:
        st.active = True
        st.local_epoch = self._epoch.load()
        self._flush(st)
        st.entries += 1
        if st.entries % self.cadence == 0:
            self.try_advance(st)

    def _outermost_leave(self, st) -> None:
        st.active = False

    # -- epoch movement --------------------------------------------------------

    def try_advance(self, st=None) -> bool:
        """Advance the global epoch if every active thread has observed it."""
        if st is None:
            st = self._state()
        epoch = self._epoch.load()
        with self._lock:
            registry = list(self._registry)
        for rec in registry:
            if rec is not st and rec.active and rec.local_epoch != epoch:
                return False
        if self._epoch.compare_and_set(epoch, epoch + 1):
            if st.active:
                st.local_epoch = epoch + 1
                self._flush(st)
            return True
        return False

    def epoch(self) -> int:
        return self._epoch.load()

    # -- retirement ---------------------------------------------------------------

    def retire(self, payload, deleter) -> None:
        st = self._state()
        if st.depth < 1:
            raise GuardContractError("retire outside a region")
        # tag with the epoch current NOW, not the one observed at region
        # entry: the unlink preceded this load, so every reader that can
        # still hold a reference entered no later than this epoch.  A
        # stale entry-time tag undercounts by one and frees a grace
        # period early.
        tag = self._epoch.load()
        st.buckets.setdefault(tag, []).append(RetiredNode(payload, deleter, tag))
        st.tag_counts[tag] = st.tag_counts.get(tag, 0) + 1

    def _flush(self, st) -> None:
        bound = st.local_epoch - 2
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

    # -- lifecycle -------------------------------------------------------------------

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
        # each cycle can advance the epoch once; three flush everything
        for _ in range(3):
            self.enter_region()
            self.try_advance()
            self.leave_region()

    def retired_in_last_two_epochs(self) -> int:
        epoch = self._epoch.load()
        with self._lock:
            states = list(self._registry) + list(self._parked)
        total = 0
        for st in states:
            for tag, count in st.tag_counts.items():
                if tag >= epoch - 1:
                    total += count
        return total
