"""Sorted lock-free linked-list set with one borrowed mark bit.

A node is logically deleted by setting the mark on its ``next`` link and
physically unlinked by swinging the predecessor past it.  Whoever wins
the unlink CAS retires the node, so retirement happens exactly once even
when traversals help finish someone else's removal.

The traversal keeps three protection points alive at any moment: the
current node, the node owning the predecessor link (held by ``save``),
and transitively everything a region-based scheme protects anyway.  A
failed ``acquire_if_equal`` (the predecessor link changed, marks
included) restarts from the head rather than spinning.
"""
from __future__ import annotations

from stampit.canary import ALIVE, check_alive, poison
from stampit.interface import ConcurrentReference, MarkedReference, NULL_REF

_MISS = object()


class ListNode:
    __slots__ = ("key", "payload", "next", "magic")

    def __init__(self, key, payload=None):
        self.key = key
        self.payload = payload
        self.next = ConcurrentReference(NULL_REF)
        self.magic = ALIVE


class LockFreeSortedList:
    def __init__(self, scheme):
        self._scheme = scheme
        self._head = ConcurrentReference(NULL_REF)

    # -- traversal ---------------------------------------------------------

    def _find(self, key):
        """Position cursors around ``key``.

        Returns ``(found, prev_cell, cur_guard, next_ref, save_guard)``.
        The caller owns both guards and must reset them.  ``prev_cell``
        is the link to CAS, ``cur_guard`` protects its referent (the
        first node with ``node.key >= key``, possibly None at the end of
        the list) and ``next_ref`` is that node's successor value.
        """
        scheme = self._scheme
        while True:
            prev = self._head
            next_ref = prev.load()
            cur = None
            save = None
            restart = False
            while True:
                ok, guard = scheme.acquire_if_equal(prev, next_ref)
                if not ok:
                    restart = True
                    break
                if cur is not None:
                    cur.reset()
                cur = guard
                node = cur.get()
                if node is None:
                    return False, prev, cur, next_ref, save
                check_alive(node)
                next_ref = node.next.load()
                if next_ref.mk != 0:
                    # logically deleted: unlink before stepping over it.
                    # Reload with the mark stripped for the splice CAS.
                    next_ref = MarkedReference(node.next.load().obj, 0)
                    if not prev.compare_and_set(cur.target, next_ref):
                        restart = True
                        break
                    cur.reclaim(poison)
                    cur = None
                    continue
                if prev.load() != cur.target:
                    restart = True
                    break
                if node.key >= key:
                    return node.key == key, prev, cur, next_ref, save
                prev = node.next
                if save is not None:
                    save.reset()
                save = cur
                cur = None
            if restart:
                if cur is not None:
                    cur.reset()
                if save is not None:
                    save.reset()

    @staticmethod
    def _release(cur, save) -> None:
        if cur is not None:
            cur.reset()
        if save is not None:
            save.reset()

    # -- operations ------------------------------------------------------------

    def insert(self, key, payload=None) -> bool:
        node = ListNode(key, payload)
        while True:
            found, prev, cur, next_ref, save = self._find(key)
            try:
                if found:
                    return False
                node.next.store(cur.target)
                if prev.compare_and_set(cur.target, MarkedReference(node, 0)):
                    self._scheme.counters.note_alloc()
                    return True
            finally:
                self._release(cur, save)

    def remove(self, key) -> bool:
        while True:
            found, prev, cur, next_ref, save = self._find(key)
            try:
                if not found:
                    return False
                node = cur.get()
                if not node.next.compare_and_set(next_ref, next_ref.with_mark(1)):
                    continue  # successor changed or someone else won the mark
                if prev.compare_and_set(cur.target, next_ref):
                    cur.reclaim(poison)
                    return True
            finally:
                self._release(cur, save)
            # we own the logical delete but lost the splice; a traversal
            # (ours here) finishes the unlink and retires the node
            found, prev, cur, next_ref, save = self._find(key)
            self._release(cur, save)
            return True

    def contains(self, key) -> bool:
        found, prev, cur, next_ref, save = self._find(key)
        self._release(cur, save)
        return found

    def get(self, key, default=None):
        found, prev, cur, next_ref, save = self._find(key)
        try:
            if not found:
                return default
            return cur.get().payload
        finally:
            self._release(cur, save)

    # -- teardown ----------------------------------------------------------------

    def dispose(self) -> None:
        """Remove and retire every node; single-threaded."""
        scheme = self._scheme
        while True:
            guard = scheme.acquire(self._head)
            node = guard.get()
            key = node.key if node is not None else None
            guard.reset()
            if key is None:
                return
            self.remove(key)
