"""Sequential reference model and its agreement with the real scheme."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from stampit.schemes import make_scheme
from stampit.verify import (
    SequentialPoolOracle,
    SerializedDriver,
    drive_scheme,
    generate_history,
    replay_history,
)

# Three overlapping regions with two retires; every stamp, bound change
# and reclaim point is pinned down by hand.
TIMELINE = [
    ("enter", 1),
    ("enter", 2),
    ("retire", 2, "n1"),
    ("enter", 3),
    ("retire", 2, "n2"),
    ("leave", 2),
    ("exit", 2),
    ("leave", 1),
    ("leave", 3),
]


def test_scripted_timeline_stamps_and_reclaims():
    res = SequentialPoolOracle().run(TIMELINE)
    assert res.entry_stamps == {1: [0], 2: [4], 3: [8]}
    assert res.retire_stamps == {"n1": 8, "n2": 12}
    # nothing is reclaimable until the first two regions have ended
    assert res.reclaims_through(6) == []
    assert res.reclaims_through(7) == ["n1"]
    assert res.reclaim_order == [(7, "n1"), (8, "n2")]
    assert res.trace[-2:] == [(12, 8), (12, 12)]
    assert res.final_unreclaimed == set()


def test_scripted_timeline_drives_scheme_identically():
    oracle = SequentialPoolOracle().run(TIMELINE)
    scheme = make_scheme("stamp-it")
    with SerializedDriver(4) as driver:
        reclaims = drive_scheme(driver, scheme, TIMELINE)
    assert reclaims == [node for _, node in oracle.reclaim_order]


def test_oracle_rejects_malformed_histories():
    oracle = SequentialPoolOracle()
    with pytest.raises(ValueError):
        oracle.run([("leave", 1)])
    with pytest.raises(ValueError):
        oracle.run([("retire", 1, "x")])
    with pytest.raises(ValueError):
        oracle.run([("enter", 1), ("exit", 1)])
    with pytest.raises(ValueError):
        oracle.run([("bogus", 1)])


def test_retire_requires_region_and_leave_requires_entry():
    oracle = SequentialPoolOracle()
    with pytest.raises(ValueError):
        oracle.run([("enter", 1), ("leave", 1), ("retire", 1, "x")])


def test_nested_regions_take_one_stamp():
    res = SequentialPoolOracle().run(
        [
            ("enter", 1),
            ("enter", 1),
            ("retire", 1, "a"),
            ("leave", 1),
            ("leave", 1),
        ]
    )
    assert res.entry_stamps == {1: [0]}
    assert res.reclaim_order == [(4, "a")]


def test_threshold_parks_segments_for_a_later_last_leaver():
    # Thread 2 retires past the threshold while thread 1 pins the bound,
    # so its leave parks the whole segment.  Even thread 1's own (last)
    # leave cannot free the segment: the empty-list bound stops one
    # increment past thread 1's entry stamp, below the retire stamps.
    # Only a later entry/leave cycle raises the bound far enough.
    history = [("enter", 1), ("enter", 2)]
    history += [("retire", 2, f"n{i}") for i in range(25)]
    history += [("leave", 2), ("exit", 2), ("leave", 1)]
    parked_at = len(history) - 1
    history += [("enter", 3), ("leave", 3)]
    oracle = SequentialPoolOracle(threshold=20).run(history)
    assert oracle.reclaims_through(parked_at) == []
    assert oracle.final_unreclaimed == set()
    last_step = len(history) - 1
    assert all(step == last_step for step, _ in oracle.reclaim_order)

    scheme = make_scheme("stamp-it")
    with SerializedDriver(4) as driver:
        reclaims = drive_scheme(driver, scheme, history)
    assert reclaims == [node for _, node in oracle.reclaim_order]


def test_replay_matches_run():
    rng = random.Random(5)
    history = generate_history(rng, n_threads=3, length=60)
    assert replay_history(history).reclaim_order == SequentialPoolOracle().run(
        history
    ).reclaim_order


@given(seed=st.integers(min_value=0, max_value=10**9))
@settings(max_examples=40, deadline=None)
def test_generated_histories_are_well_formed(seed):
    rng = random.Random(seed)
    history = generate_history(rng, n_threads=3, length=50)
    res = SequentialPoolOracle().run(history)
    # every retired node is accounted for exactly once
    reclaimed = {node for _, node in res.reclaim_order}
    assert reclaimed | res.final_unreclaimed == set(res.retire_stamps)
    assert not (reclaimed & res.final_unreclaimed)


@given(seed=st.integers(min_value=0, max_value=10**9))
@settings(max_examples=25, deadline=None)
def test_scheme_matches_oracle_on_random_histories(seed):
    rng = random.Random(seed)
    history = generate_history(rng, n_threads=3, length=60)
    oracle = SequentialPoolOracle().run(history)
    scheme = make_scheme("stamp-it")
    with SerializedDriver(3) as driver:
        reclaims = drive_scheme(driver, scheme, history)
    assert reclaims == [node for _, node in oracle.reclaim_order]


def test_oracle_trace_bounds_are_monotone():
    rng = random.Random(99)
    history = generate_history(rng, n_threads=4, length=120)
    res = SequentialPoolOracle().run(history)
    highs = [h for h, _ in res.trace]
    lows = [l for _, l in res.trace]
    assert highs == sorted(highs)
    assert lows == sorted(lows)
    assert all(l <= h for h, l in res.trace)
