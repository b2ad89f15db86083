import random

import pytest

from segsearch.indexstore import SegmentRecord, StoredWord
from segsearch.model import parse_utc
from segsearch.snippets import make_snippet


def segment(n_words: int) -> SegmentRecord:
    words = tuple(
        StoredWord(norm=f"w{i}", surface=f"W{i}", start_ms=i * 100) for i in range(n_words)
    )
    return SegmentRecord(
        doc_id="d",
        seg_index=0,
        air_date=parse_utc("2010-08-15T18:00:00Z"),
        source="s",
        language="en",
        time_range=(0, n_words * 100),
        keywords=(),
        entities=(),
        word_count=n_words,
        words=words,
    )


def best_window_by_scan(length: int, matched: dict, width: int = 30) -> tuple[int, int]:
    """Oracle: exhaustively score every window; (start, distinct terms)."""
    window = min(width, length)
    best = (0, -1)
    for start in range(0, length - window + 1):
        distinct = {
            term
            for term, hits in matched.items()
            if any(start <= pos < start + window for pos, _ in hits)
        }
        if len(distinct) > best[1]:
            best = (start, len(distinct))
    return best


def test_window_contains_match_position():
    seg = segment(500)
    snip = make_snippet(seg, {"x": [(100, 10000)]})
    assert len(snip.words) == 30
    assert snip.window_start <= 100 < snip.window_start + 30
    assert snip.highlights == (100 - snip.window_start,)


def test_short_segment_clamps():
    seg = segment(12)
    snip = make_snippet(seg, {"x": [(3, 300)]})
    assert len(snip.words) == 12
    assert snip.window_start == 0


def test_two_terms_ten_apart_share_window():
    seg = segment(200)
    snip = make_snippet(seg, {"a": [(50, 0)], "b": [(60, 0)]})
    assert snip.window_start <= 50 and 60 < snip.window_start + 30
    assert len(snip.highlights) == 2


def test_earliest_window_among_equals():
    seg = segment(100)
    snip = make_snippet(seg, {"a": [(40, 0)]})
    # every window containing position 40 has one distinct term; earliest wins
    assert snip.window_start == 11  # first start whose window [11,41) includes 40


def test_requires_a_match():
    with pytest.raises(ValueError):
        make_snippet(segment(10), {})


def test_against_window_scan_oracle():
    rng = random.Random(123)
    for _ in range(300):
        length = rng.randint(1, 120)
        seg = segment(length)
        matched = {}
        for t in range(rng.randint(1, 4)):
            positions = sorted(rng.sample(range(length), min(length, rng.randint(1, 5))))
            matched[f"t{t}"] = [(p, p * 100) for p in positions]
        snip = make_snippet(seg, matched)
        start, distinct = best_window_by_scan(length, matched)
        assert snip.window_start == start
        assert len(snip.words) == min(30, length)
        assert len(snip.highlights) >= 1
        # highlight indices point at matched positions
        flat = {p for hits in matched.values() for p, _ in hits}
        for h in snip.highlights:
            assert snip.window_start + h in flat


def test_text_is_window_surfaces():
    seg = segment(40)
    snip = make_snippet(seg, {"x": [(35, 0)]})
    assert snip.text == " ".join(snip.words)
    assert snip.words[0] == f"W{snip.window_start}"
