"""Durable task queue with time-bounded exclusive leases.

Every state transition is appended to a JSONL journal and replayed on
startup, so no accepted task is lost across restarts. A task is leased to
at most one live worker; leases expire on a caller-supplied clock, which
makes crash/retry schedules fully deterministic in tests. Completing with
a lost lease raises :class:`StaleLease` (fencing), giving at-least-once
delivery with idempotent downstream effects.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .errors import StaleLease, UnknownTask

STAGE_FETCH = "fetch"
STAGE_PROCESS = "process"
STAGE_INDEX = "index"
STAGES = (STAGE_FETCH, STAGE_PROCESS, STAGE_INDEX)

PENDING = "pending"
LEASED = "leased"
DONE = "done"
DEAD = "dead"

DEFAULT_LEASE_SECONDS = 300.0
DEFAULT_MAX_ATTEMPTS = 3


@dataclass
class Task:
    task_id: str
    stage: str
    payload: dict
    state: str = PENDING
    lease_expiry: float | None = None
    worker_id: str | None = None
    attempt_count: int = 0
    enqueued_at: float = 0.0
    dead_reason: str | None = None


class TaskQueue:
    """Linearizable queue: one mutex guards every transition."""

    def __init__(
        self,
        journal_path: str | Path | None = None,
        clock: Callable[[], float] = time.time,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    ):
        self._lock = threading.Lock()
        self._clock = clock
        self.lease_seconds = lease_seconds
        self.max_attempts = max_attempts
        self._tasks: dict[str, Task] = {}
        self._order: list[str] = []  # FIFO of task ids, lazily filtered
        self._journal_path = Path(journal_path) if journal_path else None
        self._journal_file = None
        if self._journal_path is not None:
            if self._journal_path.exists():
                self._replay()
            self._journal_path.parent.mkdir(parents=True, exist_ok=True)
            self._journal_file = open(self._journal_path, "a", encoding="utf-8")

    # -- journal ---------------------------------------------------------------

    def _append(self, op: str, task_id: str, **fields) -> None:
        if self._journal_file is None:
            return
        entry = {"op": op, "task_id": task_id, "at": self._clock(), **fields}
        self._journal_file.write(json.dumps(entry, ensure_ascii=False) + "\n")
        self._journal_file.flush()

    def _replay(self) -> None:
        for raw in self._journal_path.read_text(encoding="utf-8").splitlines():
            if not raw.strip():
                continue
            entry = json.loads(raw)
            self._apply(entry)

    def _apply(self, entry: dict) -> None:
        op = entry["op"]
        task_id = entry["task_id"]
        if op == "enqueue":
            if task_id not in self._tasks:
                self._tasks[task_id] = Task(
                    task_id=task_id,
                    stage=entry["stage"],
                    payload=entry["payload"],
                    enqueued_at=entry["at"],
                )
                self._order.append(task_id)
            return
        task = self._tasks.get(task_id)
        if task is None:
            return
        if op == "lease":
            task.state = LEASED
            task.worker_id = entry["worker_id"]
            task.lease_expiry = entry["expiry"]
            task.attempt_count = entry["attempt"]
        elif op == "stage":
            task.stage = entry["stage"]
            if entry.get("cache"):
                task.payload = {**task.payload, **entry["cache"]}
        elif op == "complete":
            task.state = DONE
            task.worker_id = None
            task.lease_expiry = None
        elif op == "requeue":
            task.state = PENDING
            task.worker_id = None
            task.lease_expiry = None
        elif op == "fail":
            task.state = PENDING
            task.worker_id = None
            task.lease_expiry = None
        elif op == "dead":
            task.state = DEAD
            task.worker_id = None
            task.lease_expiry = None
            task.dead_reason = entry.get("reason")
        elif op == "retry":
            task.state = PENDING
            task.attempt_count = 0
            task.dead_reason = None

    # -- producer side ------------------------------------------------------------

    def enqueue(self, task_id: str, payload: dict, stage: str = STAGE_FETCH) -> bool:
        """Accept a task; duplicates (same id, any state) are no-ops."""
        with self._lock:
            if task_id in self._tasks:
                return False
            self._tasks[task_id] = Task(
                task_id=task_id,
                stage=stage,
                payload=dict(payload),
                enqueued_at=self._clock(),
            )
            self._order.append(task_id)
            self._append("enqueue", task_id, stage=stage, payload=payload)
            return True

    def knows(self, task_id: str) -> bool:
        with self._lock:
            return task_id in self._tasks

    def get(self, task_id: str) -> Task:
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(task_id)
            return replace(task, payload=dict(task.payload))

    # -- worker side -----------------------------------------------------------------

    def lease(self, worker_id: str, lease_seconds: float | None = None) -> Task | None:
        """Atomically lease the oldest pending task, or None when idle."""
        with self._lock:
            now = self._clock()
            self._requeue_expired_locked(now)
            for task_id in self._order:
                task = self._tasks[task_id]
                if task.state != PENDING:
                    continue
                duration = lease_seconds if lease_seconds is not None else self.lease_seconds
                task.state = LEASED
                task.worker_id = worker_id
                task.lease_expiry = now + duration
                task.attempt_count += 1
                self._append(
                    "lease", task_id,
                    worker_id=worker_id, expiry=task.lease_expiry, attempt=task.attempt_count,
                )
                return replace(task, payload=dict(task.payload))
            return None

    def _holds_live_lease(self, task: Task, worker_id: str, now: float) -> bool:
        return (
            task.state == LEASED
            and task.worker_id == worker_id
            and task.lease_expiry is not None
            and task.lease_expiry > now
        )

    def complete(self, worker_id: str, task_id: str) -> None:
        """Mark done; rejected with :class:`StaleLease` once the lease is lost."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(task_id)
            now = self._clock()
            self._requeue_expired_locked(now)
            if not self._holds_live_lease(task, worker_id, now):
                raise StaleLease(f"{worker_id} no longer holds {task_id}")
            task.state = DONE
            task.worker_id = None
            task.lease_expiry = None
            self._append("complete", task_id, worker_id=worker_id)

    def advance_stage(
        self, worker_id: str, task_id: str, stage: str, cache: dict | None = None
    ) -> None:
        """Record stage progress under the live lease so retries resume there."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(task_id)
            now = self._clock()
            if not self._holds_live_lease(task, worker_id, now):
                raise StaleLease(f"{worker_id} no longer holds {task_id}")
            task.stage = stage
            if cache:
                task.payload = {**task.payload, **cache}
            self._append("stage", task_id, worker_id=worker_id, stage=stage, cache=cache or {})

    def fail(self, worker_id: str, task_id: str, reason: str, fatal: bool = False) -> None:
        """Report an in-band stage failure; dead-letters after max attempts,
        or immediately when the failure is known to be non-retryable."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(task_id)
            now = self._clock()
            if not self._holds_live_lease(task, worker_id, now):
                raise StaleLease(f"{worker_id} no longer holds {task_id}")
            task.worker_id = None
            task.lease_expiry = None
            if fatal or task.attempt_count >= self.max_attempts:
                task.state = DEAD
                task.dead_reason = reason
                self._append("dead", task_id, reason=reason)
            else:
                task.state = PENDING
                self._append("fail", task_id, worker_id=worker_id, reason=reason)

    def requeue_expired(self, now: float | None = None) -> list[str]:
        """Return expired leases to the pending state (or dead-letter them)."""
        with self._lock:
            return self._requeue_expired_locked(
                now if now is not None else self._clock()
            )

    def _requeue_expired_locked(self, now: float) -> list[str]:
        touched = []
        for task in self._tasks.values():
            if task.state == LEASED and task.lease_expiry is not None and task.lease_expiry <= now:
                task.worker_id = None
                task.lease_expiry = None
                if task.attempt_count >= self.max_attempts:
                    task.state = DEAD
                    task.dead_reason = "lease expired after max attempts"
                    self._append("dead", task.task_id, reason=task.dead_reason)
                else:
                    task.state = PENDING
                    self._append("requeue", task.task_id, reason="lease expired")
                touched.append(task.task_id)
        return touched

    # -- operations ------------------------------------------------------------------

    def retry(self, task_id: str) -> None:
        """Resurrect a dead-lettered task with a fresh attempt budget."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise UnknownTask(task_id)
            if task.state != DEAD:
                raise ValueError(f"{task_id} is not dead-lettered")
            task.state = PENDING
            task.attempt_count = 0
            task.dead_reason = None
            self._append("retry", task_id)

    def dead_letters(self) -> list[Task]:
        with self._lock:
            return [
                replace(t, payload=dict(t.payload))
                for t in self._tasks.values()
                if t.state == DEAD
            ]

    def status(self) -> dict[str, int]:
        with self._lock:
            counts = {PENDING: 0, LEASED: 0, DONE: 0, DEAD: 0}
            for task in self._tasks.values():
                counts[task.state] += 1
            return counts

    def all_done(self) -> bool:
        with self._lock:
            return all(t.state in (DONE, DEAD) for t in self._tasks.values())

    def close(self) -> None:
        if self._journal_file is not None:
            self._journal_file.close()
            self._journal_file = None


def lease_intervals(journal_path: str | Path) -> dict[str, list[tuple[str, float, float]]]:
    """Reconstruct per-task lease holds [(worker, start, release)] from a journal.

    The release instant is the earliest of: explicit complete/fail/requeue/dead,
    or the recorded expiry. Used to audit that no two workers ever held the
    same task simultaneously.
    """
    holds: dict[str, list[tuple[str, float, float]]] = {}
    open_lease: dict[str, tuple[str, float, float]] = {}  # task -> (worker, start, expiry)
    for raw in Path(journal_path).read_text(encoding="utf-8").splitlines():
        if not raw.strip():
            continue
        entry = json.loads(raw)
        task_id = entry["task_id"]
        op = entry["op"]
        if op == "lease":
            open_lease[task_id] = (entry["worker_id"], entry["at"], entry["expiry"])
        elif op in ("complete", "fail", "requeue", "dead"):
            held = open_lease.pop(task_id, None)
            if held is not None:
                worker, start, expiry = held
                holds.setdefault(task_id, []).append(
                    (worker, start, min(entry["at"], expiry))
                )
    for task_id, (worker, start, expiry) in open_lease.items():
        holds.setdefault(task_id, []).append((worker, start, expiry))
    return holds
