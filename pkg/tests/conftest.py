"""Shared helpers for the test suite."""

from __future__ import annotations

import pytest

from stampit.pool import (
    DELETE_MARK,
    FLAG_MASK,
    HEAD_IDX,
    PENDING_PUSH,
    STAMP_INC,
    TAIL_IDX,
    StampPool,
    block_state,
    index_of,
)


def effective_stamp(block) -> int:
    """Final stamp a block will carry once its push completes.

    While the push is in flight the stored value is the assigned stamp
    minus STAMP_INC plus the pending flag, so add the increment back.
    """
    raw = block.stamp.load()
    stamp = raw & ~FLAG_MASK
    if raw & PENDING_PUSH:
        stamp += STAMP_INC
    return stamp


def walk_prev_chain(pool: StampPool) -> list:
    """Blocks linked between head and tail, in prev (head-to-tail) order."""
    arena = pool.blocks()
    chain = []
    word = pool.head.prev.load()
    hops = 0
    while index_of(word) != TAIL_IDX:
        assert hops <= len(arena), "prev chain does not terminate"
        block = arena[index_of(word)]
        chain.append(block)
        word = block.prev.load()
        hops += 1
    return chain


def assert_pool_sane(pool: StampPool) -> None:
    """Single-threaded structural invariants of an idle pool."""
    for block in pool.blocks():
        assert block_state(block) is not None, "impossible flag/mark combination"
    chain = walk_prev_chain(pool)
    stamps = [effective_stamp(b) for b in chain]
    assert stamps == sorted(stamps, reverse=True), f"prev chain out of order: {stamps}"
    if stamps:
        assert pool.lowest_stamp() <= min(stamps)
    assert pool.lowest_stamp() <= pool.highest_stamp()


@pytest.fixture
def pool():
    return StampPool()
