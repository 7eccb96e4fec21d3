"""Use-after-reclaim detection.

Every structure node carries a magic word.  The shared deleter poisons
it, and every guarded dereference asserts it first, so a node freed
while still protected turns into an immediate, attributable failure
instead of silent corruption.  Nodes are plain Python objects kept alive
by the retire lists, which makes the poisoned state stable: a reclaimed
node can still be read, and reads reveal the poison.
"""
from __future__ import annotations

ALIVE = 0x51A3B10C
POISONED = 0xDEADBEEF


class CanaryViolation(AssertionError):
    """A node was dereferenced after its deleter ran."""


class CanaryNode:
    """Minimal canary-carrying node for scheme-level tests."""

    __slots__ = ("value", "magic")

    def __init__(self, value=None):
        self.value = value
        self.magic = ALIVE


def check_alive(node) -> None:
    if node.magic != ALIVE:
        raise CanaryViolation(f"dereferenced a reclaimed node: {node!r}")


def poison(node) -> None:
    if node.magic == POISONED:
        raise CanaryViolation(f"node reclaimed twice: {node!r}")
    node.magic = POISONED


def make_poisoning_deleter(record=None):
    """Deleter that poisons and optionally appends the node to ``record``."""
    if record is None:
        return poison

    def deleter(node):
        poison(node)
        record.append(node)

    return deleter
