import threading

import pytest

from segsearch.errors import StaleLease, UnknownTask
from segsearch.taskqueue import (
    DEAD,
    DONE,
    LEASED,
    PENDING,
    TaskQueue,
    lease_intervals,
)


class FakeClock:
    def __init__(self, start=1000.0):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


def make_queue(tmp_path, clock, **kw):
    return TaskQueue(tmp_path / "journal.jsonl", clock=clock, **kw)


def test_lease_empty_queue(tmp_path):
    q = make_queue(tmp_path, FakeClock())
    assert q.lease("w1") is None


def test_enqueue_dedup(tmp_path):
    q = make_queue(tmp_path, FakeClock())
    assert q.enqueue("t1", {"x": 1}) is True
    assert q.enqueue("t1", {"x": 2}) is False
    assert q.get("t1").payload == {"x": 1}


def test_racing_workers_one_wins(tmp_path):
    q = make_queue(tmp_path, FakeClock())
    q.enqueue("t1", {})
    results = []
    barrier = threading.Barrier(8)

    def contend(worker_id):
        barrier.wait()
        results.append(q.lease(worker_id))

    threads = [threading.Thread(target=contend, args=(f"w{i}",)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sum(1 for r in results if r is not None) == 1


def test_expired_lease_re_leasable_with_attempt_increment(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, lease_seconds=300)
    q.enqueue("t1", {})
    first = q.lease("w1")
    assert first.attempt_count == 1
    assert q.lease("w2") is None  # still held
    clock.advance(301)
    second = q.lease("w2")
    assert second is not None
    assert second.attempt_count == 2


def test_complete_marks_done_once(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock)
    q.enqueue("t1", {})
    q.lease("w1")
    q.complete("w1", "t1")
    assert q.status()[DONE] == 1
    with pytest.raises(StaleLease):
        q.complete("w1", "t1")


def test_stale_completion_after_expiry_and_re_lease(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, lease_seconds=60)
    q.enqueue("t1", {})
    q.lease("w1")
    clock.advance(61)
    assert q.lease("w2") is not None
    with pytest.raises(StaleLease):
        q.complete("w1", "t1")
    q.complete("w2", "t1")
    assert q.status()[DONE] == 1


def test_completion_after_bare_expiry_is_stale(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, lease_seconds=60)
    q.enqueue("t1", {})
    q.lease("w1")
    clock.advance(61)
    with pytest.raises(StaleLease):
        q.complete("w1", "t1")
    assert q.status()[PENDING] == 1


def test_requeue_expired_noop_when_nothing_expired(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock)
    q.enqueue("t1", {})
    q.lease("w1")
    assert q.requeue_expired() == []
    assert q.status()[LEASED] == 1


def test_dead_letter_after_max_attempts(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, max_attempts=3)
    q.enqueue("t1", {})
    for attempt in range(3):
        task = q.lease(f"w{attempt}")
        assert task is not None
        q.fail(f"w{attempt}", "t1", "parse error")
    assert q.status()[DEAD] == 1
    assert q.lease("w9") is None
    letters = q.dead_letters()
    assert letters[0].dead_reason == "parse error"


def test_fatal_failure_dead_letters_immediately(tmp_path):
    q = make_queue(tmp_path, FakeClock())
    q.enqueue("t1", {})
    q.lease("w1")
    q.fail("w1", "t1", "no transcript", fatal=True)
    assert q.status()[DEAD] == 1


def test_retry_resurrects_dead_task(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, max_attempts=1)
    q.enqueue("t1", {})
    q.lease("w1")
    q.fail("w1", "t1", "boom")
    assert q.status()[DEAD] == 1
    q.retry("t1")
    task = q.lease("w2")
    assert task is not None and task.attempt_count == 1


def test_advance_stage_requires_live_lease(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, lease_seconds=10)
    q.enqueue("t1", {}, stage="fetch")
    q.lease("w1")
    q.advance_stage("w1", "t1", "process", {"cached": "yes"})
    assert q.get("t1").stage == "process"
    assert q.get("t1").payload["cached"] == "yes"
    clock.advance(11)
    with pytest.raises(StaleLease):
        q.advance_stage("w1", "t1", "index")


def test_unknown_task(tmp_path):
    q = make_queue(tmp_path, FakeClock())
    with pytest.raises(UnknownTask):
        q.complete("w1", "nope")
    with pytest.raises(UnknownTask):
        q.get("nope")


def test_journal_replay_restores_state(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock)
    q.enqueue("a", {"v": 1})
    q.enqueue("b", {"v": 2})
    q.enqueue("c", {"v": 3})
    q.lease("w1")
    q.complete("w1", "a")
    q.lease("w1")
    q.advance_stage("w1", "b", "process", {"step": "done"})
    q.close()

    restored = make_queue(tmp_path, clock)
    status = restored.status()
    assert status[DONE] == 1
    assert status[LEASED] == 1
    assert status[PENDING] == 1
    assert restored.get("b").stage == "process"
    assert restored.get("b").payload["step"] == "done"
    # leased task's lease still honours the recorded expiry
    assert restored.lease("w2").task_id == "c"


def test_replay_after_crash_requeues_expired_leases(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, lease_seconds=30)
    q.enqueue("a", {})
    q.lease("w1")
    q.close()  # process dies holding the lease

    clock.advance(31)
    restored = make_queue(tmp_path, clock)
    task = restored.lease("w2")
    assert task is not None and task.task_id == "a"
    assert task.attempt_count == 2


def test_lease_intervals_never_overlap(tmp_path):
    clock = FakeClock()
    q = make_queue(tmp_path, clock, lease_seconds=50)
    q.enqueue("a", {})
    q.lease("w1")
    clock.advance(51)
    q.lease("w2")
    clock.advance(10)
    q.complete("w2", "a")
    holds = lease_intervals(tmp_path / "journal.jsonl")["a"]
    assert len(holds) == 2
    for (w1, s1, e1), (w2, s2, e2) in zip(holds, holds[1:]):
        assert e1 <= s2
