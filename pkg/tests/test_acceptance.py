"""Acceptance suite: the release gate.

Each test is one criterion, at its stated size and tolerance. The
terminal summary prints one PASS/FAIL line per criterion (see conftest).
"""

import random
import time

import pytest

from segsearch.codec import serialize_transcript
from segsearch.errors import CorruptIndex
from segsearch.indexstore import Index
from segsearch.metrics import pk_metric, windowdiff_metric
from segsearch.model import parse_utc, EntityType
from segsearch.pipeline import Pipeline, Worker
from segsearch.query_engine import compute_trends, execute
from segsearch.query_parser import parse_query
from segsearch.segmentation import (
    CohesionParams,
    RelationTable,
    brute_force_segment,
    document_stats,
    label_keywords,
    segment_document,
)
from segsearch.synth import (
    content_word as cw,
    demo_documents,
    inject_boundary_noise,
    make_transcript,
    random_units,
    synthetic_resources,
    throughput_transcript,
    two_topic_units,
)
from segsearch.taskqueue import DONE, TaskQueue, lease_intervals

from tests.test_metrics import naive_pk, naive_windowdiff, random_cuts
from tests.test_taskqueue import FakeClock


# -- 1. exact optimality of the segmentation search -------------------------------


def test_dp_optimality_500_random_documents():
    rng = random.Random(20100815)
    started = time.perf_counter()
    for trial in range(500):
        units = random_units(rng, max_units=12, max_vocab=8)
        lam = rng.choice([0.0, 1.0])
        relations = None
        if lam > 0:
            relations = RelationTable()
            vocab = sorted({w.lemma for unit in units for w in unit})
            for _ in range(rng.randint(0, 4)):
                if len(vocab) >= 2:
                    a, b = rng.sample(vocab, 2)
                    try:
                        relations.add(a, b, rng.uniform(0.1, 1.0))
                    except ValueError:
                        pass
        params = CohesionParams(alpha=rng.choice([0.5, 1.0, 2.0]), lambda_weight=lam)
        _, k, _ = document_stats(units, params)
        fast = segment_document(units, k, params, relations)
        slow = brute_force_segment(units, k, params, relations)
        assert fast.cuts == slow.cuts, f"trial {trial}: {fast.cuts} != {slow.cuts}"
        assert abs(fast.total_cost - slow.total_cost) <= 1e-9
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"500 documents took {elapsed:.1f}s"


# -- 2. two-topic boundary recovery ------------------------------------------------


def test_two_topic_recovery_pk_and_windowdiff_zero():
    rng = random.Random(42)
    for _ in range(100):
        units, boundary = two_topic_units(rng, units_per_topic=4)
        _, k, _ = document_stats(units)
        result = segment_document(units, k)
        T = len(units)
        reference = [0, boundary, T]
        assert pk_metric(reference, list(result.cuts), T) == 0.0
        assert windowdiff_metric(reference, list(result.cuts), T) == 0.0


# -- 3. confidence weighting buys robustness to recognition noise --------------------


def _boundary_error(cuts, boundary, total_units):
    internal = [c for c in cuts[1:-1]]
    if not internal:
        return total_units  # no boundary found at all
    return min(abs(c - boundary) for c in internal)


def test_confidence_robustness_low_conf_noise_hurts_less():
    rng = random.Random(7)
    trials = 100
    low_within_one = 0
    low_errors = 0
    high_errors = 0
    for _ in range(trials):
        units, boundary = two_topic_units(rng, units_per_topic=4)
        seed = rng.randint(0, 10**9)
        low = inject_boundary_noise(random.Random(seed), units, boundary, 0.20, confidence=0.15)
        high = inject_boundary_noise(random.Random(seed), units, boundary, 0.20, confidence=1.0)
        T = len(units)
        _, k_low, _ = document_stats(low)
        _, k_high, _ = document_stats(high)
        err_low = _boundary_error(segment_document(low, k_low).cuts, boundary, T)
        err_high = _boundary_error(segment_document(high, k_high).cuts, boundary, T)
        if err_low <= 1:
            low_within_one += 1
        low_errors += err_low
        high_errors += err_high
    assert low_within_one >= 95, f"only {low_within_one}/100 within one unit"
    assert high_errors > low_errors, (
        f"full-confidence noise should degrade strictly more "
        f"(high={high_errors}, low={low_errors})"
    )


# -- 4. zero-confidence words are exactly invisible ----------------------------------


def test_zero_confidence_erasure_1000_cases():
    rng = random.Random(99)
    params = CohesionParams()
    for _ in range(1000):
        clean = random_units(rng, max_units=8, max_vocab=6)
        noisy = []
        for u, unit in enumerate(clean):
            padded = list(unit)
            for _ in range(rng.randint(0, 3)):
                padded.insert(
                    rng.randint(0, len(padded)), cw(f"junk{rng.randint(0, 2)}", 0.0, u)
                )
            noisy.append(padded)
        counts_a, k_a, n_a = document_stats(clean, params)
        counts_b, k_b, n_b = document_stats(noisy, params)
        assert (counts_a, k_a, n_a) == (counts_b, k_b, n_b)
        a = segment_document(clean, k_a, params)
        b = segment_document(noisy, k_b, params)
        assert a.cuts == b.cuts
        assert a.total_cost == b.total_cost
        assert a.per_segment_costs == b.per_segment_costs
        for first, last in a.unit_ranges():
            seq_a = [w for u in range(first, last + 1) for w in clean[u]]
            seq_b = [w for u in range(first, last + 1) for w in noisy[u]]
            assert label_keywords(seq_a, counts_a, k_a, n_a, params) == label_keywords(
                seq_b, counts_b, k_b, n_b, params
            )


# -- 5. search is scoped to segments, not documents -----------------------------------


def test_segment_scope_semantics_fixture(demo_snapshot):
    result = execute(demo_snapshot, parse_query("ron paul barack obama"), limit=100)
    assert result.total == 1
    assert result.matches == [("pol-joint", 0)]


# -- 6. snippet contract ---------------------------------------------------------------


def _snippet_corpus():
    rng = random.Random(5150)
    vocab = [f"v{i}" for i in range(40)]
    index = Index()
    pipeline = Pipeline(index, resources={"en": synthetic_resources(vocab)})
    for d in range(30):
        blocks = []
        for _ in range(rng.randint(1, 4)):  # topical blocks -> segments
            block_vocab = rng.sample(vocab, 4)
            for _ in range(rng.randint(2, 4)):
                blocks.append(
                    [rng.choice(block_vocab) for _ in range(rng.randint(4, 40))]
                )
        t = make_transcript(
            f"snip-{d}", blocks, air_date=f"2010-{rng.randint(1, 12):02d}-15T10:00:00Z"
        )
        pipeline.index_processed(pipeline.process_transcript(t), commit=False)
    index.commit()
    return index.snapshot(), vocab, rng


def test_snippet_contract_1000_random_queries():
    snapshot, vocab, rng = _snippet_corpus()
    checked = 0
    for _ in range(1000):
        terms = rng.sample(vocab, rng.randint(1, 3))
        connector = rng.choice([" ", " OR "])
        query = connector.join(terms)
        result = execute(snapshot, parse_query(query), limit=20)
        for hit in result.hits:
            assert hit.snippet is not None
            seg = snapshot.segment(hit.doc_id, hit.seg_index)
            words = hit.snippet.words
            assert len(words) <= 30
            assert len(hit.snippet.highlights) >= 1
            start = hit.snippet.window_start
            assert start >= 0 and start + len(words) <= seg.word_count
            assert list(words) == [w.surface for w in seg.words[start : start + len(words)]]
            for h in hit.snippet.highlights:
                norm = seg.words[start + h].norm
                assert any(norm == t for t in terms)
            checked += 1
    assert checked >= 1000, f"corpus produced only {checked} snippets"


# -- 7. trends over the dated fixture corpus ------------------------------------------


def test_trends_reproduction_fixture_corpus(demo_snapshot):
    august = compute_trends(
        demo_snapshot,
        parse_utc("2010-08-01T00:00:00Z"),
        parse_utc("2010-08-31T23:59:59Z"),
        EntityType.EVENT,
    )
    assert august and august[0][0] == "Ramadan"
    late_october = compute_trends(
        demo_snapshot,
        parse_utc("2010-10-20T00:00:00Z"),
        parse_utc("2010-10-31T23:59:59Z"),
        EntityType.EVENT,
    )
    assert late_october and late_october[0][0] == "Halloween"


# -- 8. queue chaos: crashes lose nothing, effects are exactly-once --------------------


CHAOS_QUERIES = [f"c{i}word{j}" for i in range(6) for j in range(3)] + [
    "c0word0 c1word1",
    "c2word0 OR c3word2",
]


def _chaos_corpus(n_items):
    rng = random.Random(2468)
    vocab = [f"c{i}word{j}" for i in range(6) for j in range(5)]
    docs = []
    for i in range(n_items):
        topic = rng.randrange(6)
        words = [f"c{topic}word{rng.randrange(5)}" for _ in range(rng.randint(8, 20))]
        units = [words[k : k + 6] for k in range(0, len(words), 6)]
        docs.append(
            make_transcript(
                f"chaos-{i:03d}", units,
                air_date=f"2010-09-{rng.randint(1, 28):02d}T10:00:00Z",
            )
        )
    return docs, vocab


def _result_fingerprint(snapshot):
    rows = []
    for q in CHAOS_QUERIES:
        result = execute(snapshot, parse_query(q), limit=1000)
        rows.append(
            (
                q,
                result.total,
                result.matches,
                [(h.doc_id, h.seg_index, h.score) for h in result.hits],
                result.histogram,
            )
        )
    return rows


def test_queue_chaos_8_workers_crash_twice_each(tmp_path):
    n_items = 200
    docs, vocab = _chaos_corpus(n_items)
    resources = {"en": synthetic_resources(vocab)}
    payloads = [
        (f"item-{i:03d}", serialize_transcript(t).decode()) for i, t in enumerate(docs)
    ]

    # reference: one worker, no crashes
    clean_clock = FakeClock()
    clean_queue = TaskQueue(tmp_path / "clean.jsonl", clock=clean_clock)
    clean_index = Index()
    clean_pipe = Pipeline(clean_index, resources=dict(resources), spool_dir=tmp_path / "clean-spool")
    for task_id, raw in payloads:
        clean_queue.enqueue(task_id, {"inline": raw})
    Worker("solo", clean_queue, clean_pipe).run_until_idle()
    assert clean_queue.status()[DONE] == n_items

    # chaos: 8 workers, each killed and restarted twice at random points
    rng = random.Random(1357)
    clock = FakeClock()
    journal = tmp_path / "chaos.jsonl"
    queue = TaskQueue(journal, clock=clock, lease_seconds=40)
    index = Index()
    pipe = Pipeline(index, resources=dict(resources), spool_dir=tmp_path / "chaos-spool")
    for task_id, raw in payloads:
        queue.enqueue(task_id, {"inline": raw})

    slots = [Worker(f"w{i}-r0", queue, pipe) for i in range(8)]
    restarts = [0] * 8
    slot_steps = [0] * 8
    kill_at = [sorted(rng.sample(range(3, 45), 2)) for _ in range(8)]
    step = 0
    while not queue.all_done():
        step += 1
        assert step < 100_000, "chaos schedule failed to converge"
        clock.advance(1.0)
        slot = rng.randrange(8)
        slot_steps[slot] += 1
        if kill_at[slot] and slot_steps[slot] >= kill_at[slot][0]:
            kill_at[slot].pop(0)
            restarts[slot] += 1
            slots[slot] = Worker(f"w{slot}-r{restarts[slot]}", queue, pipe)  # crash + restart
            continue
        slots[slot].step()

    status = queue.status()
    assert status[DONE] == n_items
    assert status["dead"] == 0
    assert all(r == 2 for r in restarts), "every worker must crash twice"

    # effect-exactly-once: chaos index answers exactly like the clean run
    assert _result_fingerprint(index.snapshot()) == _result_fingerprint(
        clean_index.snapshot()
    )

    # lease safety, audited from the journal
    for task_id, holds in lease_intervals(journal).items():
        for (_, s1, e1), (_, s2, e2) in zip(holds, holds[1:]):
            assert e1 <= s2, f"overlapping leases on {task_id}"


# -- 9. desk-scale throughput floor ---------------------------------------------------


def test_throughput_150_transcripts_under_5_minutes():
    rng = random.Random(314)
    make_rng = random.Random(159)
    index = Index()
    started = time.perf_counter()
    vocab_cache = {}
    for i in range(150):
        t, vocab = throughput_transcript(make_rng, f"tp-{i:03d}")
        key = tuple(vocab)
        if key not in vocab_cache:
            vocab_cache[key] = synthetic_resources(vocab)
        pipeline = Pipeline(index, resources={"en": vocab_cache[key]})
        pipeline.index_processed(pipeline.process_transcript(t), commit=(i % 10 == 9))
    index.commit()
    elapsed = time.perf_counter() - started
    assert index.snapshot().stats()["documents"] == 150
    assert elapsed < 300.0, f"150 transcripts took {elapsed:.1f}s"


# -- 10. persistence round-trip + corruption detection --------------------------------


def test_persistence_roundtrip_1000_documents(tmp_path):
    rng = random.Random(777)
    vocab = [f"p{i}" for i in range(60)]
    index = Index()
    pipeline = Pipeline(index, resources={"en": synthetic_resources(vocab)})
    for i in range(1000):
        words = [rng.choice(vocab) for _ in range(rng.randint(10, 50))]
        units = [words[k : k + 8] for k in range(0, len(words), 8)]
        t = make_transcript(
            f"persist-{i:04d}", units,
            air_date=f"2010-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}T09:00:00Z",
            source=rng.choice(["alpha", "beta"]),
        )
        pipeline.index_processed(pipeline.process_transcript(t), commit=False)
    index.commit()
    index.persist(tmp_path / "big")
    loaded = Index.load(tmp_path / "big")

    before, after = index.snapshot(), loaded.snapshot()
    for _ in range(200):
        kind = rng.randrange(4)
        if kind == 0:
            q = rng.choice(vocab)
        elif kind == 1:
            q = f"{rng.choice(vocab)} {rng.choice(vocab)}"
        elif kind == 2:
            q = f"{rng.choice(vocab)} OR {rng.choice(vocab)}"
        else:
            q = f'{rng.choice(vocab)} source:alpha'
        ast = parse_query(q)
        a = execute(before, ast, limit=50)
        b = execute(after, ast, limit=50)
        assert a.total == b.total
        assert a.matches == b.matches
        assert [(h.doc_id, h.seg_index, h.score) for h in a.hits] == [
            (h.doc_id, h.seg_index, h.score) for h in b.hits
        ]
        assert a.histogram == b.histogram and a.facets == b.facets

    # checksum must catch corruption in every data file
    for name in ("postings.bin", "docs.jsonl", "facets.json"):
        index.persist(tmp_path / f"corrupt-{name}")
        target = tmp_path / f"corrupt-{name}" / name
        data = bytearray(target.read_bytes())
        data[len(data) // 2] ^= 0xFF
        target.write_bytes(bytes(data))
        with pytest.raises(CorruptIndex):
            Index.load(tmp_path / f"corrupt-{name}")


# -- 11. evaluation metrics against independent implementations --------------------------


def test_metric_oracles_1000_random_pairs():
    rng = random.Random(31337)
    for _ in range(1000):
        units = rng.randint(1, 40)
        ref = random_cuts(rng, units)
        hyp = random_cuts(rng, units)
        assert pk_metric(ref, hyp, units) == pytest.approx(
            naive_pk(ref, hyp, units), abs=1e-12
        )
        assert windowdiff_metric(ref, hyp, units) == pytest.approx(
            naive_windowdiff(ref, hyp, units), abs=1e-12
        )
