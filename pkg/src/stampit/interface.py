"""Scheme-agnostic protection interface for concurrent node reclamation.

Data structures interact with a reclamation scheme exclusively through
this module's vocabulary:

* ``MarkedReference`` -- an immutable (node, mark) pair.  Structures may
  borrow a declared number of low-order mark bits per link (Harris-style
  logical deletion uses one).
* ``ConcurrentReference`` -- a shared cell holding a ``MarkedReference``
  with atomic load / store / compare_and_set.
* ``Guard`` -- single-owner handle protecting one node from reclamation.
  Guards are acquired from a scheme, may be moved between handles, and
  must be reset (or used for ``reclaim``) before the owning thread leaves
  its outermost region.
* ``Reclaimer`` -- the scheme base class: region entry/exit, guarded
  acquisition, retire, thread exit and quiescence hooks.

Protection contract: a node only becomes unreachable through a *remove*
operation of the owning structure, the removing thread retires it exactly
once, and a retired node's memory is touched again only by its deleter.
Schemes differ in how long a retired node survives: hazard-pointer style
schemes track individual targets, region-based schemes (epoch, quiescent
state, stamp) defer reclamation while any thread remains inside a
critical region that could still hold a reference.

Atomicity is emulated with one lock per cell: mutations take the lock,
loads are single attribute reads (atomic under the interpreter lock).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass


class GuardContractError(AssertionError):
    """Raised when a guard or region operation violates its usage contract."""


class MarkedReference:
    """Immutable reference-plus-mark value.

    Equality compares the referenced object by identity and the mark by
    value, which is exactly the comparison a packed pointer-with-mark-bits
    word would give.
    """

    __slots__ = ("obj", "mk")

    def __init__(self, obj, mark: int = 0):
        self.obj = obj
        self.mk = mark

    def get(self):
        return self.obj

    def mark(self) -> int:
        return self.mk

    def with_mark(self, mark: int) -> "MarkedReference":
        return MarkedReference(self.obj, mark)

    def __eq__(self, other):
        return (
            isinstance(other, MarkedReference)
            and self.obj is other.obj
            and self.mk == other.mk
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((id(self.obj), self.mk))

    def __bool__(self):
        return self.obj is not None

    def __repr__(self):
        return f"MarkedReference({self.obj!r}, mark={self.mk})"


NULL_REF = MarkedReference(None, 0)


class ConcurrentReference:
    """Atomic cell holding a MarkedReference.

    ``mark_bits`` declares how many low-order mark bits the owning
    structure uses; stores and CAS reject values outside that range.
    """

    __slots__ = ("_value", "_lock", "_mark_limit")

    def __init__(self, value: MarkedReference = NULL_REF, mark_bits: int = 1):
        self._value = value
        self._lock = threading.Lock()
        self._mark_limit = 1 << mark_bits

    def load(self) -> MarkedReference:
        return self._value

    def store(self, value: MarkedReference) -> None:
        if value.mk >= self._mark_limit:
            raise ValueError(f"mark {value.mk} exceeds declared mark bits")
        with self._lock:
            self._value = value

    def compare_and_set(self, expected: MarkedReference, desired: MarkedReference) -> bool:
        if desired.mk >= self._mark_limit:
            raise ValueError(f"mark {desired.mk} exceeds declared mark bits")
        with self._lock:
            cur = self._value
            if cur.obj is expected.obj and cur.mk == expected.mk:
                self._value = desired
                return True
            return False


class AtomicInt:
    """Integer cell with atomic fetch_add / compare_and_set."""

    __slots__ = ("_value", "_lock")

    def __init__(self, value: int = 0):
        self._value = value
        self._lock = threading.Lock()

    def load(self) -> int:
        return self._value

    def store(self, value: int) -> None:
        with self._lock:
            self._value = value

    def fetch_add(self, delta: int) -> int:
        with self._lock:
            old = self._value
            self._value = old + delta
            return old

    def compare_and_set(self, expected: int, desired: int) -> bool:
        with self._lock:
            if self._value == expected:
                self._value = desired
                return True
            return False


class AtomicRef:
    """Reference cell with atomic compare_and_set (identity comparison)."""

    __slots__ = ("_value", "_lock")

    def __init__(self, value=None):
        self._value = value
        self._lock = threading.Lock()

    def load(self):
        return self._value

    def store(self, value) -> None:
        with self._lock:
            self._value = value

    def compare_and_set(self, expected, desired) -> bool:
        with self._lock:
            if self._value is expected:
                self._value = desired
                return True
            return False


class _CounterCell:
    """Per-thread counter record; written only by its owning thread."""

    __slots__ = ("allocated", "reclaimed", "ops", "scan_steps", "acquisitions")

    def __init__(self):
        self.allocated = 0
        self.reclaimed = 0
        self.ops = 0
        self.scan_steps = 0
        self.acquisitions = 0


@dataclass(frozen=True)
class CounterTotals:
    allocated: int
    reclaimed: int
    ops: int
    scan_steps: int
    acquisitions: int

    @property
    def unreclaimed(self) -> int:
        return self.allocated - self.reclaimed


class PerfCounters:
    """Aggregated per-thread event counters.

    Each thread owns a private cell (single writer, so unsynchronized
    ``+=`` is safe); ``totals`` folds a snapshot of every cell ever
    registered, including cells of threads that have exited.  Snapshots
    taken while workers run are racy by design: they may miss in-flight
    increments, but ``allocated - reclaimed`` computed from one snapshot
    never goes negative because a node is always counted allocated before
    it can be retired.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._cells: list[_CounterCell] = []
        self._tls = threading.local()

    def cell(self) -> _CounterCell:
        c = getattr(self._tls, "cell", None)
        if c is None:
            c = _CounterCell()
            with self._lock:
                self._cells.append(c)
            self._tls.cell = c
        return c

    def note_alloc(self, n: int = 1) -> None:
        self.cell().allocated += n

    def note_ops(self, n: int = 1) -> None:
        self.cell().ops += n

    def totals(self) -> CounterTotals:
        with self._lock:
            cells = list(self._cells)
        # Sum reclaimed before allocated: an alloc is published before the
        # matching free, so reading frees first keeps reclaimed <= allocated
        # even mid-run.
        freed = ops = steps = acq = 0
        for c in cells:
            freed += c.reclaimed
            ops += c.ops
            steps += c.scan_steps
            acq += c.acquisitions
        alloc = 0
        for c in cells:
            alloc += c.allocated
        return CounterTotals(alloc, freed, ops, steps, acq)


class Guard:
    """Move-only handle protecting at most one node.

    ``target`` is the MarkedReference observed at acquisition time (marks
    included).  ``reset`` drops the protection and empties the handle;
    ``reclaim`` retires the target through the owning scheme and then
    resets.  Both are idempotent only in the empty state: reclaiming an
    empty guard is a contract violation.
    """

    __slots__ = ("_scheme", "_target", "_owns_region", "_slot")

    def __init__(self, scheme: "Reclaimer"):
        self._scheme = scheme
        self._target = NULL_REF
        self._owns_region = False
        self._slot = None

    @property
    def target(self) -> MarkedReference:
        return self._target

    def get(self):
        return self._target.obj

    def mark(self) -> int:
        return self._target.mk

    def __bool__(self):
        return self._target.obj is not None

    def reset(self) -> None:
        self._target = NULL_REF
        slot, self._slot = self._slot, None
        if slot is not None:
            self._scheme._release_slot(slot)
        if self._owns_region:
            self._owns_region = False
            self._scheme.leave_region()

    def reclaim(self, deleter) -> None:
        obj = self._target.obj
        if obj is None:
            raise GuardContractError("reclaim on an empty guard")
        self._scheme.retire(obj, deleter)
        self.reset()

    def adopt(self, other: "Guard") -> None:
        """Move ``other``'s target and protection into this guard.

        The source is left empty without releasing anything, so the
        protection transfers rather than lapsing.
        """
        if other is self:
            return
        self.reset()
        self._target = other._target
        self._owns_region = other._owns_region
        self._slot = other._slot
        other._target = NULL_REF
        other._owns_region = False
        other._slot = None


class RegionGuard:
    """Context manager pinning the calling thread inside a critical region."""

    __slots__ = ("_scheme", "_active")

    def __init__(self, scheme: "Reclaimer"):
        self._scheme = scheme
        self._active = False

    def __enter__(self):
        self._scheme.enter_region()
        self._active = True
        return self

    def __exit__(self, *exc):
        self.release()
        return False

    def release(self) -> None:
        if self._active:
            self._active = False
            self._scheme.leave_region()


class _NullRegionGuard:
    """Region guard for schemes that ignore explicit regions."""

    __slots__ = ()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def release(self) -> None:
        pass


class Reclaimer:
    """Base class for reclamation schemes.

    Subclasses implement ``_enter``, ``_leave``, ``retire`` and the
    protection strategy behind ``acquire``.  The default acquire is the
    region-based one: entering the region once protects every node that
    is still reachable, so a single load suffices.
    """

    name = "abstract"

    def __init__(self):
        self.counters = PerfCounters()

    # -- regions -------------------------------------------------------

    def region(self):
        return RegionGuard(self)

    def enter_region(self) -> None:
        raise NotImplementedError

    def leave_region(self) -> None:
        raise NotImplementedError

    # -- guarded acquisition -------------------------------------------

    def acquire(self, src: ConcurrentReference) -> Guard:
        """Return a guard protecting the node currently referenced by ``src``."""
        raise NotImplementedError

    def acquire_if_equal(
        self, src: ConcurrentReference, expected: MarkedReference
    ) -> tuple[bool, Guard]:
        """Protect ``src``'s referent only if the cell still holds ``expected``.

        Marks participate in the comparison.  On mismatch the returned
        guard is empty and nothing stays protected, so the attempt is
        bounded even under contention.
        """
        raise NotImplementedError

    # -- retirement ----------------------------------------------------

    def retire(self, obj, deleter) -> None:
        """Hand ``obj`` to the scheme; ``deleter(obj)`` runs once it is safe."""
        raise NotImplementedError

    def _run_deleter(self, node, cell) -> None:
        node.deleter(node.payload)
        cell.reclaimed += 1

    # -- lifecycle -----------------------------------------------------

    def on_thread_exit(self) -> None:
        """Release per-thread scheme state; call once per worker before it dies."""
        raise NotImplementedError

    def quiesce(self) -> None:
        """Give the scheme a chance to reclaim while the caller is idle."""
        raise NotImplementedError

    # -- HPR slot plumbing (no-op for region-based schemes) -------------

    def _release_slot(self, slot) -> None:
        pass


class RetiredNode:
    """Intrusive retire-list node: payload, deleter and an ordering stamp."""

    __slots__ = ("payload", "deleter", "stamp", "next")

    def __init__(self, payload, deleter, stamp: int = 0):
        self.payload = payload
        self.deleter = deleter
        self.stamp = stamp
        self.next = None
