"""Stamp-ordered reclamation scheme.

Each thread entering its outermost region pushes a block into the shared
:class:`~stampit.pool.StampPool` and receives a strictly increasing
stamp.  Retired nodes are stamped with the pool's next-stamp-to-assign
counter, which makes "every region that could hold this node has ended"
decidable by a single comparison: the node is reclaimable as soon as its
retire stamp is at most the pool's lowest stamp.

Retire lists are thread-local, stamp-ordered by construction (stamps are
taken from a monotonic counter), so a reclaim pass frees a prefix and
stops at the first survivor: amortized O(1) steps per reclaimed node.
When a leaving thread is the last one in the pool it additionally drains
a global list of retire-list segments; other leavers with more than
``threshold`` local nodes park their segment on that global list so no
segment is stranded with an inactive thread.
"""
from __future__ import annotations

from stampit.interface import AtomicRef, GuardContractError, RetiredNode
from stampit.pool import FLAG_MASK, StampPool
from stampit.schemes.base import RegionReclaimer


class _State:
    __slots__ = ("depth", "block", "rhead", "rtail", "count", "cell")

    def __init__(self, cell):
        self.depth = 0
        self.block = None
        self.rhead = None
        self.rtail = None
        self.count = 0
        self.cell = cell


class _Sublist:
    __slots__ = ("head", "next")

    def __init__(self, head):
        self.head = head
        self.next = None


class StampItScheme(RegionReclaimer):
    name = "stamp-it"

    def __init__(self, threshold: int = 20, initial_stamp: int = 0):
        super().__init__()
        self.pool = StampPool(initial_stamp)
        self.threshold = threshold
        self._global = AtomicRef(None)
        # verification seam: widens the reclaim bound; any value > 0 is
        # deliberately unsafe and only used to prove the canaries bite
        self.reclaim_slack = 0

    def _new_state(self):
        return _State(self.counters.cell())

    # -- region boundaries -------------------------------------------------

    def _outermost_enter(self, st) -> None:
        if st.block is None:
            st.block = self.pool.acquire_block()
        self.pool.push(st.block)

    def _outermost_leave(self, st) -> None:
        was_last = self.pool.remove(st.block)
        self._reclaim_local(st)
        if was_last:
            self._reclaim_global(st)
        elif st.count > self.threshold:
            self._push_global(st)

    # -- retirement --------------------------------------------------------

    def retire(self, payload, deleter) -> None:
        st = self._state()
        if st.depth < 1:
            raise GuardContractError("retire outside a region")
        node = RetiredNode(payload, deleter, self.pool.retire_stamp())
        if st.rtail is None:
            st.rhead = node
        else:
            st.rtail.next = node
        st.rtail = node
        st.count += 1

    def _reclaim_local(self, st) -> None:
        node = st.rhead
        if node is None:
            return
        bound = self.pool.lowest_stamp() + self.reclaim_slack
        cell = st.cell
        freed = 0
        steps = 0
        while node is not None and node.stamp <= bound:
            steps += 1
            node.deleter(node.payload)
            cell.reclaimed += 1
            node = node.next
            freed += 1
        if node is not None:
            steps += 1  # the survivor that stopped the pass
        cell.scan_steps += steps
        st.count -= freed
        st.rhead = node
        if node is None:
            st.rtail = None

    def _push_global(self, st) -> None:
        sub = _Sublist(st.rhead)
        st.rhead = None
        st.rtail = None
        st.count = 0
        while True:
            head = self._global.load()
            sub.next = head
            if self._global.compare_and_set(head, sub):
                return

    def _take_all(self):
        while True:
            head = self._global.load()
            if head is None:
                return []
            if self._global.compare_and_set(head, None):
                chains = []
                sub = head
                while sub is not None:
                    chains.append(sub.head)
                    sub = sub.next
                return chains  # newest segment first

    def _reclaim_global(self, st) -> None:
        pending = self._take_all()
        if not pending:
            return
        bound = self.pool.lowest_stamp() + self.reclaim_slack
        cell = st.cell
        while True:
            survivors = []
            for node in pending:
                steps = 0
                while node is not None and node.stamp <= bound:
                    steps += 1
                    node.deleter(node.payload)
                    cell.reclaimed += 1
                    node = node.next
                if node is not None:
                    steps += 1
                    survivors.append(node)
                cell.scan_steps += steps
            new_bound = self.pool.lowest_stamp() + self.reclaim_slack
            if survivors and new_bound > bound:
                # someone left while we trimmed; their segments may now be
                # reclaimable, so run another pass before re-parking
                bound = new_bound
                pending = survivors
                continue
            for node in reversed(survivors):
                chain = _Sublist(node)
                while True:
                    head = self._global.load()
                    chain.next = head
                    if self._global.compare_and_set(head, chain):
                        break
            return

    # -- lifecycle -----------------------------------------------------------

    def on_thread_exit(self) -> None:
        st = self._state()
        if st.depth != 0:
            raise GuardContractError("thread exit inside a region")
        if st.rhead is not None:
            self._push_global(st)
        if st.block is not None:
            self.pool.release_block(st.block)
            st.block = None
        self._tls.st = None

    def quiesce(self) -> None:
        self.enter_region()
        self.leave_region()

    # -- introspection ---------------------------------------------------------

    def entry_stamp(self) -> int:
        """Stamp of the calling thread's current outermost region entry."""
        st = self._state()
        if st.depth < 1 or st.block is None:
            raise GuardContractError("entry_stamp outside a region")
        return st.block.stamp.load() & ~FLAG_MASK

    def local_retired(self) -> int:
        return self._state().count
