"""Shared machinery for region-based reclamation schemes.

Epoch, quiescent-state and stamp-based schemes all protect nodes the
same way: a thread inside a critical region may hold plain references to
anything that was reachable when the region began, so ``acquire`` is a
region entry plus a single load.  Subclasses define what happens at the
outermost region boundary.
"""
from __future__ import annotations

import threading

from stampit.interface import (
    ConcurrentReference,
    Guard,
    GuardContractError,
    MarkedReference,
    Reclaimer,
)


class RegionReclaimer(Reclaimer):
    """Region-entry protection with per-thread state and nesting."""

    def __init__(self):
        super().__init__()
        self._tls = threading.local()

    def _new_state(self):
        raise NotImplementedError

    def _state(self):
        st = getattr(self._tls, "st", None)
        if st is None:
            st = self._new_state()
            self._tls.st = st
        return st

    def _outermost_enter(self, st) -> None:
        raise NotImplementedError

    def _outermost_leave(self, st) -> None:
        raise NotImplementedError

    # -- regions ---------------------------------------------------------

    def enter_region(self) -> None:
        st = self._state()
        if st.depth == 0:
            self._outermost_enter(st)
        st.depth += 1

    def leave_region(self) -> None:
        st = self._state()
        if st.depth <= 0:
            raise GuardContractError("leave_region without a matching enter")
        if st.depth == 1:
            self._outermost_leave(st)
        st.depth -= 1

    # -- guarded acquisition ----------------------------------------------

    def acquire(self, src: ConcurrentReference) -> Guard:
        st = self._state()
        if st.depth == 0:
            self._outermost_enter(st)
        st.depth += 1
        st.cell.acquisitions += 1
        guard = Guard(self)
        guard._owns_region = True
        guard._target = src.load()
        return guard

    def acquire_if_equal(
        self, src: ConcurrentReference, expected: MarkedReference
    ) -> tuple[bool, Guard]:
        st = self._state()
        if st.depth == 0:
            self._outermost_enter(st)
        st.depth += 1
        st.cell.acquisitions += 1
        value = src.load()
        if value.obj is not expected.obj or value.mk != expected.mk:
            if st.depth == 1:
                self._outermost_leave(st)
            st.depth -= 1
            return False, Guard(self)
        guard = Guard(self)
        guard._owns_region = True
        guard._target = value
        return True, guard
