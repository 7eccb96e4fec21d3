"""Small-model interleaving checker for the stamp pool.

The pool's cells call an injectable hook before every atomic access.
``Stepper`` turns that hook into a cooperative scheduler: worker threads
park at each atomic step and a single controller decides who performs
the next one.  Executions are deterministic functions of the choice
sequence, so a schedule can be replayed exactly.

``interleave_check`` explores every schedule of a scenario within a
preemption bound (exhaustive enumeration of all interleavings is
hopeless even at this depth; bounding the number of involuntary context
switches is the standard sound restriction, and almost all concurrency
bugs need very few).  After every granted step, while all threads are
parked, the scenario's invariant runs against the frozen pool state; a
final check runs at completion.

Scenarios are factories returning fresh state per run: the same initial
pool, the same per-thread scripts, the same checks.
"""
from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass, field


class StepBudgetExceeded(RuntimeError):
    pass


class _Worker:
    __slots__ = ("tid", "thread", "go", "done", "error", "steps")

    def __init__(self, tid: int):
        self.tid = tid
        self.thread = None
        self.go = threading.Event()
        self.done = False
        self.error = None
        self.steps = 0


class Stepper:
    """Runs per-thread scripts against one pool, one atomic step at a time."""

    def __init__(self, pool, fns, step_budget: int = 100_000):
        self.pool = pool
        self.fns = fns
        self.step_budget = step_budget
        self.workers = [_Worker(t) for t in range(len(fns))]
        self._events: queue.Queue = queue.Queue()
        self._tls = threading.local()
        self._total_steps = 0
        pool.set_step_hook(self._hook)

    def _hook(self) -> None:
        worker = getattr(self._tls, "worker", None)
        if worker is None:
            return  # controller-side reads are invisible to scheduling
        self._total_steps += 1
        if self._total_steps > self.step_budget:
            raise StepBudgetExceeded(f"exceeded {self.step_budget} atomic steps")
        self._park(worker)

    def _park(self, worker: _Worker) -> None:
        self._events.put(worker.tid)
        if not worker.go.wait(timeout=60):
            raise RuntimeError(f"worker {worker.tid} starved; controller gone?")
        worker.go.clear()

    def _run_worker(self, worker: _Worker, fn) -> None:
        self._tls.worker = worker
        try:
            self._park(worker)  # park before the first instruction
            fn()
        except BaseException as exc:
            worker.error = exc
        finally:
            worker.done = True
            self._events.put(worker.tid)

    def start(self) -> None:
        for worker, fn in zip(self.workers, self.fns):
            worker.thread = threading.Thread(
                target=self._run_worker, args=(worker, fn), daemon=True
            )
            worker.thread.start()
        for _ in self.workers:
            self._await_event()

    def _await_event(self) -> int:
        try:
            return self._events.get(timeout=60)
        except queue.Empty:
            raise RuntimeError("no worker reached a step point; deadlock?") from None

    def runnable(self) -> list[int]:
        return [w.tid for w in self.workers if not w.done]

    def grant(self, tid: int) -> None:
        """Let thread ``tid`` perform one atomic step (or finish)."""
        worker = self.workers[tid]
        if worker.done:
            raise ValueError(f"thread {tid} already finished")
        worker.go.set()
        got = self._await_event()
        if got != tid:
            raise RuntimeError(f"expected event from {tid}, got {got}")

    def finish(self) -> None:
        """Run every remaining thread to completion, round-robin."""
        while True:
            runnable = self.runnable()
            if not runnable:
                break
            for tid in runnable:
                if not self.workers[tid].done:
                    self.grant(tid)

    def shutdown(self) -> None:
        self.pool.set_step_hook(None)
        for worker in self.workers:
            worker.go.set()
        for worker in self.workers:
            if worker.thread is not None:
                worker.thread.join(timeout=5)

    def errors(self) -> list:
        return [(w.tid, w.error) for w in self.workers if w.error is not None]


@dataclass
class InterleaveResult:
    schedules: int = 0
    steps: int = 0
    violations: list = field(default_factory=list)
    elapsed_s: float = 0.0
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def run_schedule(scenario, schedule, step_budget: int = 100_000) -> "InterleaveResult":
    """Replay one explicit schedule prefix under the default policy.

    ``schedule`` is a sequence of thread ids; entries naming threads that
    already finished are skipped, and once the schedule is exhausted the
    current thread runs on until it finishes, then the lowest runnable id
    takes over.  ``scenario()`` must return a dict with ``pool``, ``fns``
    and optionally ``invariant`` / ``final`` callables.
    """
    result = InterleaveResult()
    started = time.perf_counter()
    state = scenario()
    stepper = Stepper(state["pool"], state["fns"], step_budget)
    invariant = state.get("invariant")
    final = state.get("final")
    trace: list[int] = []
    error = None
    try:
        stepper.start()
        position = 0
        current = None
        while True:
            runnable = stepper.runnable()
            if not runnable:
                break
            choice = None
            while position < len(schedule):
                candidate = schedule[position]
                position += 1
                if candidate in runnable:
                    choice = candidate
                    break
            if choice is None:
                choice = current if current in runnable else min(runnable)
            current = choice
            stepper.grant(choice)
            trace.append(choice)
            if invariant is not None:
                invariant(state)
        worker_errors = stepper.errors()
        if worker_errors:
            error = worker_errors[0][1]
        elif final is not None:
            final(state)
    except BaseException as exc:
        error = exc
    finally:
        stepper.shutdown()
    result.schedules = 1
    result.steps = len(trace)
    if error is not None:
        result.violations.append((tuple(trace), repr(error)))
    result.elapsed_s = time.perf_counter() - started
    return result


def interleave_check(
    scenario,
    preemption_bound: int = 2,
    max_schedules: int | None = None,
    time_budget_s: float | None = None,
    step_budget: int = 100_000,
) -> InterleaveResult:
    """Explore all schedules of ``scenario`` within ``preemption_bound``.

    Depth-first over choice prefixes: each run follows its prefix, then
    the default continue-current policy, recording every point where
    another runnable thread could have been scheduled instead and what
    that alternative would cost in preemptions.  Alternatives within
    budget are pushed as new prefixes.
    """
    result = InterleaveResult()
    started = time.perf_counter()
    seen: set = set()
    stack: list[tuple] = [()]

    while stack:
        if max_schedules is not None and result.schedules >= max_schedules:
            result.truncated = True
            break
        if time_budget_s is not None and time.perf_counter() - started > time_budget_s:
            result.truncated = True
            break
        prefix = stack.pop()
        if prefix in seen:
            continue
        seen.add(prefix)

        state = scenario()
        stepper = Stepper(state["pool"], state["fns"], step_budget)
        invariant = state.get("invariant")
        final = state.get("final")
        trace: list[int] = []
        # (position, cost of switching there, alternative threads)
        branch_points: list[tuple[int, int, tuple[int, ...]]] = []
        cost = 0
        error = None
        try:
            stepper.start()
            position = 0
            current = None
            while True:
                runnable = stepper.runnable()
                if not runnable:
                    break
                if position < len(prefix):
                    choice = prefix[position]
                    if choice not in runnable:
                        raise RuntimeError(
                            f"replay diverged: thread {choice} not runnable at {position}"
                        )
                else:
                    choice = current if current in runnable else min(runnable)
                    alternatives = tuple(t for t in runnable if t != choice)
                    if alternatives:
                        # switching away from a still-runnable thread
                        # costs a preemption; from a finished one it's free
                        switch_cost = 1 if current in runnable else 0
                        branch_points.append((position, cost + switch_cost, alternatives))
                if current is not None and choice != current and current in runnable:
                    cost += 1
                position += 1
                current = choice
                stepper.grant(choice)
                trace.append(choice)
                if invariant is not None:
                    invariant(state)
            worker_errors = stepper.errors()
            if worker_errors:
                error = worker_errors[0][1]
            elif final is not None:
                final(state)
        except BaseException as exc:
            error = exc
        finally:
            result.steps += len(trace)
            stepper.shutdown()

        result.schedules += 1
        if error is not None:
            result.violations.append((tuple(trace), repr(error)))
            result.elapsed_s = time.perf_counter() - started
            return result

        for position, branch_cost, alternatives in branch_points:
            if branch_cost > preemption_bound:
                continue
            for alt in alternatives:
                new_prefix = tuple(trace[:position]) + (alt,)
                if new_prefix not in seen:
                    stack.append(new_prefix)

    result.elapsed_s = time.perf_counter() - started
    return result
