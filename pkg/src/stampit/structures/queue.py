"""Lock-free FIFO queue (two-pointer, dummy-node algorithm).

Dequeue retires the node that served as the dummy and promotes the
dequeued node into the new dummy, so every allocated node is retired
exactly once over its lifetime.  ``dequeue`` on an empty queue returns
None.
"""
from __future__ import annotations

from stampit.canary import ALIVE, check_alive, poison
from stampit.interface import ConcurrentReference, MarkedReference, NULL_REF


class QueueNode:
    __slots__ = ("value", "next", "magic")

    def __init__(self, value):
        self.value = value
        self.next = ConcurrentReference(NULL_REF)
        self.magic = ALIVE


class MichaelScottQueue:
    def __init__(self, scheme):
        self._scheme = scheme
        dummy = QueueNode(None)
        scheme.counters.note_alloc()
        ref = MarkedReference(dummy)
        self._head = ConcurrentReference(ref)
        self._tail = ConcurrentReference(ref)

    def enqueue(self, value) -> None:
        scheme = self._scheme
        node = QueueNode(value)
        node_ref = MarkedReference(node)
        while True:
            tail_guard = scheme.acquire(self._tail)
            tail = tail_guard.get()
            check_alive(tail)
            next_ref = tail.next.load()
            if self._tail.load().obj is not tail:
                tail_guard.reset()
                continue
            if next_ref.obj is None:
                if tail.next.compare_and_set(next_ref, node_ref):
                    self._tail.compare_and_set(tail_guard.target, node_ref)
                    tail_guard.reset()
                    scheme.counters.note_alloc()
                    return
            else:
                # tail lags behind; help it forward
                self._tail.compare_and_set(tail_guard.target, MarkedReference(next_ref.obj))
            tail_guard.reset()

    def dequeue(self):
        scheme = self._scheme
        while True:
            head_guard = scheme.acquire(self._head)
            head = head_guard.get()
            check_alive(head)
            tail_ref = self._tail.load()
            next_guard = scheme.acquire(head.next)
            if self._head.load().obj is not head:
                next_guard.reset()
                head_guard.reset()
                continue
            next_node = next_guard.get()
            if next_node is None:
                next_guard.reset()
                head_guard.reset()
                return None
            if head is tail_ref.obj:
                self._tail.compare_and_set(tail_ref, MarkedReference(next_node))
                next_guard.reset()
                head_guard.reset()
                continue
            check_alive(next_node)
            value = next_node.value
            if self._head.compare_and_set(head_guard.target, MarkedReference(next_node)):
                head_guard.reclaim(poison)
                next_guard.reset()
                return value
            next_guard.reset()
            head_guard.reset()

    def dispose(self) -> None:
        """Drain and retire everything, the dummy included; single-threaded."""
        while self.dequeue() is not None:
            pass
        scheme = self._scheme
        scheme.enter_region()
        try:
            dummy = self._head.load().obj
            if dummy is not None:
                check_alive(dummy)
                scheme.retire(dummy, poison)
                self._head.store(NULL_REF)
                self._tail.store(NULL_REF)
        finally:
            scheme.leave_region()
