"""Lock-free data structures built on the guard/region interface."""

from stampit.structures.queue import MichaelScottQueue, QueueNode
from stampit.structures.sortedlist import ListNode, LockFreeSortedList
from stampit.structures.hashmap import FifoBoundedHashMap

STRUCTURE_NAMES = ("queue", "list", "hashmap")

__all__ = [
    "MichaelScottQueue",
    "QueueNode",
    "LockFreeSortedList",
    "ListNode",
    "FifoBoundedHashMap",
    "STRUCTURE_NAMES",
]
