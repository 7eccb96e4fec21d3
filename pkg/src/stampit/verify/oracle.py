"""Sequential oracle for the stamped reclamation scheme.

``SequentialPoolOracle`` replays a serialized history of region and
retire events and predicts, step by step, exactly what the real scheme
must do when the same history is executed one event at a time: the stamp
assigned to every region entry, the retire stamp of every node, the
highest/lowest stamp after each event, and the precise order in which
deleters run.

The tail-stamp model mirrors the real update rules, including the two
corner cases when the pool empties: the new tail is the leaver's stamp
plus one increment unless at least two further stamps were dispensed in
the meantime, in which case the head counter itself becomes the tail.

``SerializedDriver`` executes the same histories against a real scheme,
one event at a time, each thread id bound to a dedicated worker thread
(blocks and retire lists are thread-owned, so events must run on stable
threads even when serialized).
"""
from __future__ import annotations

import queue
import threading
from dataclasses import dataclass, field

from stampit.pool import STAMP_INC

ENTER = "enter"
LEAVE = "leave"
RETIRE = "retire"
EXIT = "exit"


@dataclass
class OracleResult:
    entry_stamps: dict = field(default_factory=dict)  # tid -> [stamp, ...]
    retire_stamps: dict = field(default_factory=dict)  # node_id -> stamp
    reclaim_order: list = field(default_factory=list)  # [(step, node_id), ...]
    trace: list = field(default_factory=list)  # [(highest, lowest) after each step]
    final_unreclaimed: set = field(default_factory=set)

    def reclaims_through(self, step: int) -> list:
        """Node ids reclaimed by the end of event ``step`` (0-based)."""
        return [n for s, n in self.reclaim_order if s <= step]


class SequentialPoolOracle:
    """Independent model of pool stamps, tail updates and retire lists."""

    def __init__(self, threshold: int = 20, initial_stamp: int = 0):
        self.threshold = threshold
        self.head = initial_stamp
        self.tail = initial_stamp
        self.entries: dict = {}  # tid -> stamp (outermost region entry)
        self.depth: dict = {}  # tid -> nesting depth
        self.locals: dict = {}  # tid -> [(node_id, stamp), ...] in retire order
        self.global_subs: list = []  # newest-first stack of sublists
        self.result = OracleResult()
        self._step = -1

    # -- events ----------------------------------------------------------

    def apply(self, event) -> None:
        self._step += 1
        kind = event[0]
        if kind == ENTER:
            self._enter(event[1])
        elif kind == LEAVE:
            self._leave(event[1])
        elif kind == RETIRE:
            self._retire(event[1], event[2])
        elif kind == EXIT:
            self._exit(event[1])
        else:
            raise ValueError(f"unknown event kind {kind!r}")
        self.result.trace.append((self.head, self.tail))

    def run(self, history) -> OracleResult:
        for event in history:
            self.apply(event)
        for sub in self.global_subs:
            self.result.final_unreclaimed.update(n for n, _ in sub)
        for nodes in self.locals.values():
            self.result.final_unreclaimed.update(n for n, _ in nodes)
        return self.result

    # -- event semantics ---------------------------------------------------

    def _enter(self, tid) -> None:
        depth = self.depth.get(tid, 0)
        if depth == 0:
            stamp = self.head
            self.head += STAMP_INC
            self.entries[tid] = stamp
            self.result.entry_stamps.setdefault(tid, []).append(stamp)
        self.depth[tid] = depth + 1

    def _retire(self, tid, node_id) -> None:
        if self.depth.get(tid, 0) < 1:
            raise ValueError(f"retire outside a region (tid={tid})")
        stamp = self.head
        self.result.retire_stamps[node_id] = stamp
        self.locals.setdefault(tid, []).append((node_id, stamp))

    def _leave(self, tid) -> None:
        depth = self.depth.get(tid, 0)
        if depth < 1:
            raise ValueError(f"leave without matching enter (tid={tid})")
        self.depth[tid] = depth - 1
        if depth > 1:
            return
        stamp = self.entries.pop(tid)
        remaining = self.entries.values()
        was_last = not remaining or stamp < min(remaining)
        if was_last:
            fallback = stamp + STAMP_INC
            if remaining:
                candidate = min(remaining)
            elif self.head <= stamp + 2 * STAMP_INC:
                # zero or one stamp dispensed since ours: fallback wins
                candidate = fallback
            else:
                candidate = self.head
            self.tail = max(self.tail, max(fallback, candidate))
        self._reclaim_local(tid)
        if was_last:
            self._reclaim_global()
        elif len(self.locals.get(tid, ())) > self.threshold:
            self.global_subs.insert(0, self.locals.pop(tid))

    def _exit(self, tid) -> None:
        if self.depth.get(tid, 0) != 0:
            raise ValueError(f"thread exit inside a region (tid={tid})")
        nodes = self.locals.pop(tid, None)
        if nodes:
            self.global_subs.insert(0, nodes)

    # -- reclamation -------------------------------------------------------

    def _reclaim_local(self, tid) -> None:
        nodes = self.locals.get(tid)
        if not nodes:
            return
        kept = self._reclaim_prefix(nodes)
        if kept:
            self.locals[tid] = kept
        else:
            self.locals.pop(tid, None)

    def _reclaim_global(self) -> None:
        survivors = []
        for sub in self.global_subs:
            kept = self._reclaim_prefix(sub)
            if kept:
                survivors.append(kept)
        self.global_subs = survivors

    def _reclaim_prefix(self, nodes) -> list:
        bound = self.tail
        i = 0
        while i < len(nodes) and nodes[i][1] <= bound:
            self.result.reclaim_order.append((self._step, nodes[i][0]))
            i += 1
        return nodes[i:]


def replay_history(history, threshold: int = 20, initial_stamp: int = 0) -> OracleResult:
    return SequentialPoolOracle(threshold, initial_stamp).run(history)


def generate_history(rng, n_threads: int, length: int, retire_weight: float = 0.45):
    """Random well-formed history over ``n_threads`` thread ids.

    Produces enters, nested enters, retires, leaves and thread exits.
    Node ids are sequential ints.
    """
    history = []
    depth = [0] * n_threads
    next_node = 0
    for _ in range(length):
        tid = rng.randrange(n_threads)
        if depth[tid] == 0:
            if rng.random() < 0.15:
                history.append((EXIT, tid))
            else:
                history.append((ENTER, tid))
                depth[tid] += 1
        else:
            r = rng.random()
            if r < retire_weight:
                history.append((RETIRE, tid, next_node))
                next_node += 1
            elif r < retire_weight + 0.40:
                history.append((LEAVE, tid))
                depth[tid] -= 1
            else:
                history.append((ENTER, tid))
                depth[tid] += 1
    for tid in range(n_threads):
        while depth[tid] > 0:
            history.append((LEAVE, tid))
            depth[tid] -= 1
    return history


class SerializedDriver:
    """Runs callables on a fixed set of persistent worker threads.

    Histories exercise per-thread scheme state, so every event for thread
    id ``k`` must execute on the same OS thread across the whole history
    (and across histories, for speed the workers are reused).
    """

    def __init__(self, n_threads: int):
        self._cmd = [queue.Queue(maxsize=1) for _ in range(n_threads)]
        self._res = [queue.Queue(maxsize=1) for _ in range(n_threads)]
        self._threads = []
        for k in range(n_threads):
            t = threading.Thread(target=self._serve, args=(k,), daemon=True)
            t.start()
            self._threads.append(t)

    def _serve(self, k: int) -> None:
        while True:
            fn = self._cmd[k].get()
            if fn is None:
                return
            try:
                self._res[k].put((True, fn()))
            except BaseException as exc:  # surfaced to the caller
                self._res[k].put((False, exc))

    def run(self, tid: int, fn):
        self._cmd[tid].put(fn)
        ok, value = self._res[tid].get()
        if not ok:
            raise value
        return value

    def close(self) -> None:
        for q in self._cmd:
            q.put(None)
        for t in self._threads:
            t.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def drive_scheme(driver: SerializedDriver, scheme, history, on_step=None):
    """Execute ``history`` against a real scheme through ``driver``.

    Deleters append node ids to the returned list, preserving global
    reclamation order.  ``on_step(step_index)`` runs after each event.
    """
    reclaimed: list = []

    def deleter_for(node_id):
        def deleter(_payload):
            reclaimed.append(node_id)

        return deleter

    for step, event in enumerate(history):
        kind = event[0]
        tid = event[1]
        if kind == ENTER:
            driver.run(tid, scheme.enter_region)
        elif kind == LEAVE:
            driver.run(tid, scheme.leave_region)
        elif kind == RETIRE:
            node_id = event[2]
            driver.run(
                tid,
                lambda nid=node_id: scheme.retire(object(), deleter_for(nid)),
            )
        elif kind == EXIT:
            driver.run(tid, scheme.on_thread_exit)
        else:
            raise ValueError(f"unknown event kind {kind!r}")
        if on_step is not None:
            on_step(step)
    return reclaimed
