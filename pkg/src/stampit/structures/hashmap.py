"""Bounded hash map: per-bucket sorted lists plus a FIFO eviction queue.

Keys hash into a fixed bucket array via a multiplicative mix; each
bucket is a lock-free sorted list of key/payload entries.  Every
successful insert enqueues its key on a shared FIFO; once the entry
count exceeds the capacity, threads dequeue victim keys and remove them
until the map fits again.  Stale FIFO entries (keys already gone) are
skipped.  Evicted entries are retired through the scheme like any other
removal, so a payload can never be destroyed while a reader still
guards its entry.
"""
from __future__ import annotations

from stampit.interface import AtomicInt
from stampit.structures.queue import MichaelScottQueue
from stampit.structures.sortedlist import LockFreeSortedList

_MISS = object()
_HASH_MIX = 0x9E3779B97F4A7C15
_WORD = (1 << 64) - 1


class FifoBoundedHashMap:
    def __init__(self, scheme, buckets: int = 2048, capacity: int = 10000):
        if buckets < 1 or capacity < 1:
            raise ValueError("buckets and capacity must be positive")
        self._scheme = scheme
        self._buckets = [LockFreeSortedList(scheme) for _ in range(buckets)]
        self._nbuckets = buckets
        self.capacity = capacity
        self._fifo = MichaelScottQueue(scheme)
        self._count = AtomicInt(0)

    def _bucket(self, key) -> LockFreeSortedList:
        return self._buckets[((key * _HASH_MIX) & _WORD) % self._nbuckets]

    def get(self, key, default=None):
        return self._bucket(key).get(key, default)

    def get_or_compute(self, key, compute):
        """Return ``(payload, hit)``; computes and inserts on a miss.

        Under a race the compute callback may run in several threads but
        exactly one result is published; losers re-read the winner's.
        """
        bucket = self._bucket(key)
        while True:
            payload = bucket.get(key, _MISS)
            if payload is not _MISS:
                return payload, True
            payload = compute(key)
            if bucket.insert(key, payload):
                self._fifo.enqueue(key)
                if self._count.fetch_add(1) + 1 > self.capacity:
                    self._evict()
                return payload, False

    def remove(self, key) -> bool:
        if self._bucket(key).remove(key):
            self._count.fetch_add(-1)
            return True
        return False

    def _evict(self) -> None:
        while self._count.load() > self.capacity:
            victim = self._fifo.dequeue()
            if victim is None:
                return
            if self._bucket(victim).remove(victim):
                self._count.fetch_add(-1)

    def size(self) -> int:
        return self._count.load()

    def dispose(self) -> None:
        """Retire every entry and the FIFO queue; single-threaded."""
        for bucket in self._buckets:
            bucket.dispose()
        self._fifo.dispose()
        self._count.store(0)
