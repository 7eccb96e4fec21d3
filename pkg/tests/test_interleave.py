"""Controlled-stepper machinery and small-model exhaustive exploration."""

from __future__ import annotations

import pytest

from stampit.pool import (
    FLAG_MASK,
    PENDING_PUSH,
    STATE_BEING_INSERTED,
    STATE_BEING_REMOVED,
    STATE_IN_POOL,
    STATE_REMOVED,
    StampPool,
    block_state,
)
from stampit.verify import (
    StepBudgetExceeded,
    Stepper,
    interleave_check,
    run_schedule,
)

from conftest import effective_stamp


def push_remove_scenario(n_threads: int):
    """Each thread pushes its own block, then removes it."""

    def scenario():
        pool = StampPool()
        blocks = [pool.acquire_block() for _ in range(n_threads)]
        seen = {"tail": 0}

        def work(i):
            def fn():
                pool.push(blocks[i])
                pool.remove(blocks[i])

            return fn

        def invariant(state):
            for b in pool.blocks():
                assert block_state(b) is not None, "impossible flag/mark combo"
            t = pool.lowest_stamp()
            assert t % 4 == 0
            assert t >= seen["tail"], "lower bound moved backwards"
            seen["tail"] = t

        def final(state):
            head_ctr = pool.retire_stamp()
            stamps = []
            for b in blocks:
                assert block_state(b) == STATE_REMOVED
                stamps.append(effective_stamp(b))
            assert len(set(stamps)) == n_threads, "stamps must be distinct"
            assert all(s % 4 == 0 and 0 <= s < head_ctr for s in stamps)
            assert pool.lowest_stamp() <= head_ctr

        return {
            "pool": pool,
            "fns": [work(i) for i in range(n_threads)],
            "invariant": invariant,
            "final": final,
        }

    return scenario


def test_stepper_runs_to_completion_deterministically():
    scenario = push_remove_scenario(2)
    r1 = run_schedule(scenario, [0, 1] * 200)
    r2 = run_schedule(scenario, [0, 1] * 200)
    assert r1.ok and r2.ok
    assert r1.steps == r2.steps


def test_run_schedule_empty_prefix_default_policy():
    res = run_schedule(push_remove_scenario(2), [])
    assert res.ok
    assert res.steps > 0


def test_step_budget_guards_against_livelock():
    def scenario():
        pool = StampPool()
        block = pool.acquire_block()

        def spin():
            while True:
                pool.head.stamp.load()

        return {"pool": pool, "fns": [spin]}

    res = run_schedule(scenario, [], step_budget=50)
    assert not res.ok
    assert any("StepBudgetExceeded" in v[1] for v in res.violations)


def test_observed_states_during_scripted_push_and_remove():
    pool = StampPool()
    block = pool.acquire_block()
    stepper = Stepper(pool, [lambda: pool.push(block)])
    stepper.start()
    saw_pending = False
    while stepper.runnable():
        raw = block.stamp.load()
        if raw & PENDING_PUSH:
            saw_pending = True
            assert block_state(block) == STATE_BEING_INSERTED
            # pending encoding: assigned stamp minus one increment
            assert raw & ~FLAG_MASK == 0 - 4  # assigned stamp 0, raw is -3
        stepper.grant(0)
    stepper.shutdown()
    assert stepper.errors() == []
    assert saw_pending
    assert block_state(block) == STATE_IN_POOL
    assert block.stamp.load() == 0

    stepper = Stepper(pool, [lambda: pool.remove(block)])
    stepper.start()
    saw_removing = False
    while stepper.runnable():
        if block_state(block) == STATE_BEING_REMOVED:
            saw_removing = True
        stepper.grant(0)
    stepper.shutdown()
    assert stepper.errors() == []
    assert saw_removing
    assert block_state(block) == STATE_REMOVED


def test_exhaustive_two_thread_push_remove():
    res = interleave_check(push_remove_scenario(2), preemption_bound=2)
    assert res.ok, res.violations[:1]
    assert not res.truncated
    assert res.schedules > 100


def test_exhaustive_push_while_other_removes():
    """One thread's push must survive helping from a concurrent remover."""

    def scenario():
        pool = StampPool()
        resident = pool.acquire_block()
        pool.push(resident)  # stamp 0, linked before the race starts
        incoming = pool.acquire_block()

        def pusher():
            pool.push(incoming)

        def remover():
            pool.remove(resident)

        def invariant(state):
            for b in pool.blocks():
                assert block_state(b) is not None

        def final(state):
            assert block_state(incoming) == STATE_IN_POOL
            assert block_state(resident) == STATE_REMOVED
            assert effective_stamp(incoming) >= 4
            assert pool.lowest_stamp() <= effective_stamp(incoming)

        return {
            "pool": pool,
            "fns": [pusher, remover],
            "invariant": invariant,
            "final": final,
        }

    res = interleave_check(scenario, preemption_bound=2)
    assert res.ok, res.violations[:1]
    assert not res.truncated


def recycle_scenario():
    """Thread 0 removes the middle block while thread 1 removes the
    newest one, releases it, re-acquires it (the free list hands the
    same slot back) and pushes it again: any helper still holding a
    stale link to the slot must fail its tag-checked update."""
    pool = StampPool()
    a, b, c = (pool.acquire_block() for _ in range(3))
    for blk in (a, b, c):
        pool.push(blk)  # stamps 0, 4, 8

    def slow_remover():
        pool.remove(b)

    def recycler():
        pool.remove(c)
        pool.release_block(c)
        again = pool.acquire_block()
        assert again is c
        pool.push(again)

    def invariant(state):
        for blk in pool.blocks():
            assert block_state(blk) is not None

    def final(state):
        assert block_state(b) == STATE_REMOVED
        assert block_state(c) == STATE_IN_POOL
        assert block_state(a) == STATE_IN_POOL
        assert effective_stamp(c) >= 12
        pool.remove(a)
        pool.remove(c)

    return {
        "pool": pool,
        "fns": [slow_remover, recycler],
        "invariant": invariant,
        "final": final,
    }


def test_exhaustive_recycled_block_cannot_confuse_remover():
    res = interleave_check(recycle_scenario, preemption_bound=2)
    assert res.ok, res.violations[:1]
    assert not res.truncated


def test_preemption_bound_zero_is_sequential():
    res = interleave_check(push_remove_scenario(2), preemption_bound=0)
    assert res.ok
    # with no preemptions allowed, only thread-completion switches remain:
    # one schedule per completion order of the two workers
    assert res.schedules == 2


def test_three_thread_smoke_bound_one():
    res = interleave_check(push_remove_scenario(3), preemption_bound=1)
    assert res.ok, res.violations[:1]
    assert not res.truncated
    assert res.schedules > 50
