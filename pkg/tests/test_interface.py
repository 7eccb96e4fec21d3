"""Marked references, atomic cells, and counter aggregation."""

from __future__ import annotations

import threading

import pytest
from hypothesis import given, strategies as st

from stampit.interface import (
    NULL_REF,
    AtomicInt,
    AtomicRef,
    ConcurrentReference,
    MarkedReference,
    PerfCounters,
)


class Thing:
    def __init__(self, v):
        self.v = v


def test_marked_reference_identity_equality():
    a, b = Thing(1), Thing(1)
    assert MarkedReference(a, 0) == MarkedReference(a, 0)
    assert MarkedReference(a, 0) != MarkedReference(b, 0)
    assert MarkedReference(a, 0) != MarkedReference(a, 1)
    assert MarkedReference(None, 0) == NULL_REF
    assert not MarkedReference(None, 0)
    assert not MarkedReference(None, 1)
    assert MarkedReference(a, 0)


def test_marked_reference_accessors():
    a = Thing(2)
    ref = MarkedReference(a, 1)
    assert ref.get() is a
    assert ref.mark() == 1
    assert ref.with_mark(0) == MarkedReference(a, 0)
    # with_mark leaves the original untouched
    assert ref.mark() == 1


@given(mark=st.integers(min_value=0, max_value=1), use_obj=st.booleans())
def test_marked_reference_roundtrip(mark, use_obj):
    obj = Thing(0) if use_obj else None
    ref = MarkedReference(obj, mark)
    assert ref.get() is obj
    assert ref.mark() == mark
    assert ref == MarkedReference(obj, mark)


def test_concurrent_reference_cas_semantics():
    a, b = Thing(1), Thing(2)
    cell = ConcurrentReference()
    assert cell.load() == NULL_REF
    cell.store(MarkedReference(a, 0))
    # CAS fails when the expected mark differs
    assert not cell.compare_and_set(MarkedReference(a, 1), MarkedReference(b, 0))
    assert cell.load().get() is a
    assert cell.compare_and_set(MarkedReference(a, 0), MarkedReference(a, 1))
    assert cell.load().mark() == 1
    # CAS fails on identity mismatch even for equal-valued objects
    assert not cell.compare_and_set(MarkedReference(Thing(1), 1), NULL_REF)
    assert cell.compare_and_set(MarkedReference(a, 1), NULL_REF)
    assert cell.load() == NULL_REF


def test_concurrent_reference_rejects_wide_marks():
    cell = ConcurrentReference()
    with pytest.raises(ValueError):
        cell.store(MarkedReference(None, 2))


def test_atomic_int():
    n = AtomicInt(5)
    assert n.fetch_add(3) == 5
    assert n.load() == 8
    assert not n.compare_and_set(5, 0)
    assert n.compare_and_set(8, 0)
    n.store(-1)
    assert n.load() == -1


def test_atomic_ref_identity():
    a, b = Thing(1), Thing(1)
    r = AtomicRef(a)
    assert not r.compare_and_set(b, None)
    assert r.compare_and_set(a, b)
    assert r.load() is b


def test_counter_totals_never_negative_under_concurrency():
    """allocated - reclaimed stays >= 0 in every racy snapshot.

    Producers allocate in their own cells; a consumer frees in its cell.
    The two-pass snapshot (frees before allocations) must never observe
    a free whose allocation it missed.
    """
    counters = PerfCounters()
    stop = threading.Event()
    import queue as q

    tokens: q.Queue = q.Queue()

    def producer():
        while not stop.is_set():
            counters.note_alloc()
            tokens.put(1)

    def consumer():
        cell = counters.cell()
        while not stop.is_set() or not tokens.empty():
            try:
                tokens.get(timeout=0.01)
            except q.Empty:
                continue
            cell.reclaimed += 1

    threads = [threading.Thread(target=producer) for _ in range(3)]
    threads.append(threading.Thread(target=consumer))
    for t in threads:
        t.start()
    bad = 0
    for _ in range(3000):
        t = counters.totals()
        if t.unreclaimed < 0 or t.reclaimed > t.allocated:
            bad += 1
    stop.set()
    for t in threads:
        t.join()
    assert bad == 0
    final = counters.totals()
    assert final.unreclaimed == 0
    assert final.allocated == final.reclaimed


def test_counters_per_thread_cells_accumulate():
    counters = PerfCounters()
    counters.note_ops(7)
    counters.note_alloc(2)

    def other():
        counters.note_ops(5)

    t = threading.Thread(target=other)
    t.start()
    t.join()
    totals = counters.totals()
    assert totals.ops == 12
    assert totals.allocated == 2
    assert totals.unreclaimed == 2
