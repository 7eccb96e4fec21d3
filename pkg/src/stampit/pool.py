"""Lock-free pool of stamped thread blocks.

The pool is a doubly-linked list ordered by entry stamp.  Two static
dummy blocks bound it: ``head`` (carries the next stamp to assign) and
``tail`` (carries a lower bound on the stamps of blocks still linked).
A thread entering a critical region pushes its block at the head; on
leaving it removes the block from anywhere in the list.  Stamps are
strictly increasing multiples of ``STAMP_INC``, so the stamp order of
linked blocks always matches their position between head and tail.

Only the ``prev`` direction (head towards tail) is kept consistent at
all times; ``next`` links act as hints that removal repairs lazily.
Consequences relied on elsewhere:

* ``tail.next`` usually points at the oldest linked block, but may lag.
* Traversals run along ``prev`` and treat ``next`` values as candidates
  that must be revalidated.

Every link is a packed integer ``index << 18 | tag << 1 | delete_mark``.
``index`` names a block in the pool's append-only arena (blocks are
recycled through a free list, never released, so an index stays valid
forever).  The 17-bit version tag increments on every successful store
or compare-and-set, which keeps a compare-and-set from succeeding
against a recycled block's stale link even when the target index
matches.  Same-cell revalidations therefore compare whole words, while
cross-cell checks compare only the target index.

The stamp field of a block packs ``stamp | flags`` where the two flag
bits are mutually exclusive: ``PENDING_PUSH`` while the block's
insertion is in flight (the stored value is then the assigned stamp
minus ``STAMP_INC`` plus the flag, and helpers may finalize it) and
``NOT_IN_LIST`` once the block has been fully removed.

A block has four observable states, decidable from its flag bits and the
delete marks of its two links: being inserted, linked, being removed,
and removed.  The verification helpers in :mod:`stampit.verify` assert
that no other combination ever appears.

Cells accept an optional yield hook that fires before every atomic
access; the interleaving checker uses it to schedule threads at
hardware-step granularity.  In production the hook stays ``None``.
"""
from __future__ import annotations

import threading

DELETE_MARK = 1
TAG_SHIFT = 1
TAG_BITS = 17
TAG_MASK = (1 << TAG_BITS) - 1
IDX_SHIFT = TAG_SHIFT + TAG_BITS

PENDING_PUSH = 1
NOT_IN_LIST = 2
FLAG_MASK = PENDING_PUSH | NOT_IN_LIST
STAMP_INC = 4

HEAD_IDX = 0
TAIL_IDX = 1


def pack(index: int, tag: int, mark: int) -> int:
    return (index << IDX_SHIFT) | ((tag & TAG_MASK) << TAG_SHIFT) | mark


def index_of(word: int) -> int:
    return word >> IDX_SHIFT


def tag_of(word: int) -> int:
    return (word >> TAG_SHIFT) & TAG_MASK


def mark_of(word: int) -> int:
    return word & DELETE_MARK


class _HookBox:
    __slots__ = ("fn",)

    def __init__(self):
        self.fn = None


class LinkCell:
    """Atomic packed-link cell; every successful mutation bumps the tag."""

    __slots__ = ("_word", "_lock", "_hook")

    def __init__(self, word: int, hook: _HookBox):
        self._word = word
        self._lock = threading.Lock()
        self._hook = hook

    def load(self) -> int:
        h = self._hook.fn
        if h is not None:
            h()
        return self._word

    def store(self, index: int, mark: int) -> None:
        h = self._hook.fn
        if h is not None:
            h()
        with self._lock:
            tag = (((self._word >> TAG_SHIFT) & TAG_MASK) + 1) & TAG_MASK
            self._word = (index << IDX_SHIFT) | (tag << TAG_SHIFT) | mark

    def compare_and_set(self, expected: int, index: int, mark: int) -> bool:
        h = self._hook.fn
        if h is not None:
            h()
        with self._lock:
            if self._word != expected:
                return False
            tag = (((expected >> TAG_SHIFT) & TAG_MASK) + 1) & TAG_MASK
            self._word = (index << IDX_SHIFT) | (tag << TAG_SHIFT) | mark
            return True


class StampCell:
    """Atomic stamp field: plain integer with fetch_add and CAS."""

    __slots__ = ("_value", "_lock", "_hook")

    def __init__(self, value: int, hook: _HookBox):
        self._value = value
        self._lock = threading.Lock()
        self._hook = hook

    def load(self) -> int:
        h = self._hook.fn
        if h is not None:
            h()
        return self._value

    def store(self, value: int) -> None:
        h = self._hook.fn
        if h is not None:
            h()
        with self._lock:
            self._value = value

    def fetch_add(self, delta: int) -> int:
        h = self._hook.fn
        if h is not None:
            h()
        with self._lock:
            old = self._value
            self._value = old + delta
            return old

    def compare_and_set(self, expected: int, desired: int) -> tuple[bool, int]:
        """Returns (success, value observed at the decision point)."""
        h = self._hook.fn
        if h is not None:
            h()
        with self._lock:
            cur = self._value
            if cur == expected:
                self._value = desired
                return True, cur
            return False, cur


class Block:
    """One pool slot.  Recycled through the free list, never discarded."""

    __slots__ = ("index", "prev", "next", "stamp", "owner")

    def __init__(self, index: int, hook: _HookBox):
        self.index = index
        # fresh blocks start in the removed state
        self.prev = LinkCell(pack(TAIL_IDX, 0, DELETE_MARK), hook)
        self.next = LinkCell(pack(HEAD_IDX, 0, 0), hook)
        self.stamp = StampCell(NOT_IN_LIST, hook)
        self.owner = None


class StampPool:
    """The shared block list plus stamp dispenser."""

    def __init__(self, initial_stamp: int = 0):
        if initial_stamp % STAMP_INC:
            raise ValueError("initial stamp must be a multiple of STAMP_INC")
        self._hook = _HookBox()
        head = Block.__new__(Block)
        head.index = HEAD_IDX
        head.prev = LinkCell(pack(TAIL_IDX, 0, 0), self._hook)
        head.next = LinkCell(pack(TAIL_IDX, 0, 0), self._hook)
        head.stamp = StampCell(initial_stamp, self._hook)
        head.owner = None
        tail = Block.__new__(Block)
        tail.index = TAIL_IDX
        tail.prev = LinkCell(pack(TAIL_IDX, 0, 0), self._hook)
        tail.next = LinkCell(pack(HEAD_IDX, 0, 0), self._hook)
        tail.stamp = StampCell(initial_stamp, self._hook)
        tail.owner = None
        self._head = head
        self._tail = tail
        self._arena: list[Block] = [head, tail]
        self._free: list[Block] = []
        self._alloc_lock = threading.Lock()

    # -- instrumentation -------------------------------------------------

    def set_step_hook(self, fn) -> None:
        """Install (or clear) the per-atomic-access yield hook."""
        self._hook.fn = fn

    @property
    def head(self) -> Block:
        return self._head

    @property
    def tail(self) -> Block:
        return self._tail

    def blocks(self) -> list[Block]:
        with self._alloc_lock:
            return list(self._arena)

    # -- block lifecycle -------------------------------------------------

    def acquire_block(self) -> Block:
        with self._alloc_lock:
            if self._free:
                block = self._free.pop()
            else:
                block = Block(len(self._arena), self._hook)
                self._arena.append(block)
        block.owner = threading.get_ident()
        return block

    def release_block(self, block: Block) -> None:
        block.owner = None
        with self._alloc_lock:
            self._free.append(block)

    # -- stamps ------------------------------------------------------------

    def highest_stamp(self) -> int:
        """Next stamp to be assigned; also the stamp recorded for retires."""
        return self._head.stamp.load() & ~FLAG_MASK

    retire_stamp = highest_stamp

    def lowest_stamp(self) -> int:
        """Lower bound on the stamp of every block still linked."""
        return self._tail.stamp.load() & ~FLAG_MASK

    # -- push ---------------------------------------------------------------

    def push(self, block: Block) -> int:
        """Insert ``block`` at the head; returns its assigned stamp."""
        arena = self._arena
        head = self._head
        block.next.store(HEAD_IDX, 0)
        head_prev = head.prev.load()
        stamp = 0
        while True:
            observed = head.prev.load()
            if head_prev != observed:
                head_prev = observed
                continue
            stamp = head.stamp.fetch_add(STAMP_INC)
            # visible early: assigned stamp, still flagged as in-flight
            block.stamp.store(stamp - STAMP_INC + PENDING_PUSH)
            if head.prev.load() != head_prev:
                continue
            block.prev.store(index_of(head_prev), 0)
            if head.prev.compare_and_set(head_prev, block.index, 0):
                break
        block.stamp.store(stamp)
        # lazily repair the next hint of the predecessor
        my_prev_idx = index_of(head_prev)
        prev_blk = arena[my_prev_idx]
        while True:
            link = prev_blk.next.load()
            if index_of(link) == block.index:
                break
            if link & DELETE_MARK:
                break
            if index_of(block.prev.load()) != my_prev_idx:
                break
            if prev_blk.next.compare_and_set(link, block.index, 0):
                break
        return stamp

    # -- remove ---------------------------------------------------------------

    def remove(self, block: Block) -> bool:
        """Unlink ``block``; returns True when it was the oldest linked block."""
        prev = self._set_delete_mark(block.prev)
        next_ = self._set_delete_mark(block.next)
        prev, next_, fully_removed = self._remove_from_prev_list(block, prev, next_)
        if not fully_removed:
            self._remove_from_next_list(block, prev, next_)
        stamp = block.stamp.load()
        block.stamp.store(stamp + NOT_IN_LIST)
        was_last = index_of(block.prev.load()) == TAIL_IDX
        if was_last:
            self._update_tail_stamp(stamp + STAMP_INC)
        return was_last

    def _set_delete_mark(self, cell: LinkCell) -> int:
        while True:
            word = cell.load()
            if word & DELETE_MARK:
                return word
            if cell.compare_and_set(word, index_of(word), DELETE_MARK):
                return pack(index_of(word), tag_of(word) + 1, DELETE_MARK)

    def _remove_from_prev_list(self, block: Block, prev: int, next_: int):
        """Splice ``block`` out of the consistent direction.

        Walks ``prev`` (towards tail) from the marked cursors, helping
        neighbours that are mid-insertion or mid-removal, until the block
        between ``prev`` and ``next_`` is exactly ours and the younger
        neighbour's prev can be swung past us.  Returns the final cursors
        plus a flag saying some helper already finished the whole removal.
        """
        arena = self._arena
        my_stamp = block.stamp.load()
        last = None
        while True:
            if index_of(next_) == index_of(prev):
                return prev, block.next.load(), False
            prev_blk = arena[index_of(prev)]
            prev_prev = prev_blk.prev.load()
            prev_stamp = prev_blk.stamp.load()
            if prev_stamp > my_stamp or (prev_stamp & NOT_IN_LIST):
                # a helper has already detached us
                return prev, next_, True
            if prev_prev & DELETE_MARK:
                if not self._mark_next(prev_blk, prev_stamp):
                    return prev, next_, True
                prev = prev_blk.prev.load()
                continue
            next_blk = arena[index_of(next_)]
            next_prev = next_blk.prev.load()
            next_stamp = next_blk.stamp.load()
            if next_prev != next_blk.prev.load():
                continue
            if next_stamp < my_stamp:
                return prev, block.next.load(), False
            if next_stamp & (NOT_IN_LIST | PENDING_PUSH):
                if last is not None:
                    next_, last = last, None
                else:
                    next_ = next_blk.next.load()
                continue
            advanced, next_, last = self._remove_or_skip_marked_block(
                next_, last, next_prev, next_stamp
            )
            if advanced:
                continue
            if index_of(next_prev) != block.index:
                next_, last = self._move_next(next_prev, next_, last)
                continue
            if next_blk.prev.compare_and_set(next_prev, index_of(prev), 0):
                return prev, next_, False

    def _remove_from_next_list(self, block: Block, prev: int, next_: int) -> None:
        """Repair the hint direction so no linked block's next targets us."""
        arena = self._arena
        my_stamp = block.stamp.load()
        last = None
        while True:
            next_blk = arena[index_of(next_)]
            next_prev = next_blk.prev.load()
            next_stamp = next_blk.stamp.load()
            if next_prev != next_blk.prev.load():
                continue
            if next_stamp & (NOT_IN_LIST | PENDING_PUSH):
                if last is not None:
                    next_, last = last, None
                else:
                    next_ = next_blk.next.load()
                continue
            prev_blk = arena[index_of(prev)]
            prev_next = prev_blk.next.load()
            prev_stamp = prev_blk.stamp.load()
            if prev_stamp > my_stamp or (prev_stamp & NOT_IN_LIST):
                return
            if prev_next & DELETE_MARK:
                prev = prev_blk.prev.load()
                continue
            if index_of(next_) == index_of(prev):
                return
            advanced, next_, last = self._remove_or_skip_marked_block(
                next_, last, next_prev, next_stamp
            )
            if advanced:
                continue
            if index_of(next_prev) != index_of(prev):
                next_, last = self._move_next(next_prev, next_, last)
                continue
            if next_stamp <= my_stamp or index_of(prev_next) == index_of(next_):
                return
            if (
                next_blk.prev.load() == next_prev
                and prev_blk.next.compare_and_set(prev_next, index_of(next_), 0)
                and (next_blk.next.load() & DELETE_MARK) == 0
            ):
                return

    def _mark_next(self, block: Block, stamp: int) -> bool:
        """Set the delete mark on ``block.next`` while its stamp stays ``stamp``.

        The expected word is always loaded before the stamp revalidation, so
        a successful compare-and-set proves the word predates a moment the
        block still carried ``stamp``.  Loading it the other way round lets a
        stalled helper mark a block that was recycled and re-inserted in the
        meantime.
        """
        link = block.next.load()
        while block.stamp.load() == stamp:
            if link & DELETE_MARK:
                return True
            if block.next.compare_and_set(link, index_of(link), DELETE_MARK):
                return True
            link = block.next.load()
        return False

    def _move_next(self, next_prev: int, next_: int, last):
        """Step the next-cursor one block towards tail, finalizing a
        pending insertion on the way so stamp order stays observable."""
        arena = self._arena
        candidate = arena[index_of(next_prev)]
        cand_stamp = candidate.stamp.load()
        if (cand_stamp & PENDING_PUSH) and arena[index_of(next_)].prev.load() == next_prev:
            finalized = cand_stamp + STAMP_INC - PENDING_PUSH
            ok, observed = candidate.stamp.compare_and_set(cand_stamp, finalized)
            if not ok and observed != finalized:
                return next_, last
        return next_prev, next_

    def _remove_or_skip_marked_block(self, next_: int, last, next_prev: int, next_stamp: int):
        """If the next-cursor's block is itself being removed, help detach
        it (when we remember a younger block) or fall back to its hint."""
        arena = self._arena
        if next_prev & DELETE_MARK:
            if last is not None:
                next_blk = arena[index_of(next_)]
                if self._mark_next(next_blk, next_stamp):
                    last_blk = arena[index_of(last)]
                    if last_blk.prev.load() == next_:
                        last_blk.prev.compare_and_set(next_, index_of(next_prev), 0)
                next_, last = last, None
            else:
                next_ = arena[index_of(next_)].next.load()
            return True, next_, last
        return False, next_, last

    def _update_tail_stamp(self, fallback: int) -> None:
        """Raise the tail stamp after removing the oldest block.

        Prefers the stamp of the new oldest block (via the tail.next
        hint, revalidated); when the pool looks empty the head counter is
        used only if no insertion can have slipped in, which the
        tag-bumping CAS on head.prev enforces.  Falls back to the
        remover's own stamp + STAMP_INC, which is always a valid lower
        bound.  The tail stamp itself only ever increases.
        """
        arena = self._arena
        head, tail = self._head, self._tail
        stamp = fallback
        last = tail.next.load()
        last_blk = arena[index_of(last)]
        last_prev = last_blk.prev.load()
        last_stamp = last_blk.stamp.load()
        if (
            last_stamp > stamp
            and index_of(last_prev) == TAIL_IDX
            and tail.next.load() == last
        ):
            if index_of(last) != HEAD_IDX:
                stamp = last_stamp
            elif stamp < last_stamp - STAMP_INC and head.prev.compare_and_set(
                last_prev, index_of(last_prev), mark_of(last_prev)
            ):
                stamp = last_stamp
        tail_stamp = tail.stamp.load()
        while tail_stamp < stamp:
            ok, tail_stamp = tail.stamp.compare_and_set(tail_stamp, stamp)
            if ok:
                break


# -- block state decoding (used by the verification harness) ---------------

STATE_BEING_INSERTED = "being_inserted"
STATE_IN_POOL = "in_pool"
STATE_BEING_REMOVED = "being_removed"
STATE_REMOVED = "removed"


def block_state(block: Block):
    """Classify a block, or return None for an impossible flag/mark combo."""
    stamp = block.stamp.load()
    prev_marked = block.prev.load() & DELETE_MARK
    next_marked = block.next.load() & DELETE_MARK
    pending = stamp & PENDING_PUSH
    gone = stamp & NOT_IN_LIST
    if pending and gone:
        return None
    if pending:
        return STATE_BEING_INSERTED if not next_marked else None
    if gone:
        return STATE_REMOVED if prev_marked else None
    if prev_marked:
        return STATE_BEING_REMOVED
    if next_marked:
        # next may only be marked after prev
        return None
    return STATE_IN_POOL
