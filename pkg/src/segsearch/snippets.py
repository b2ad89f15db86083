"""Snippet selection: a window of at most 30 stored words around the hits.

The window maximizing the number of distinct matched query terms wins;
among equals the earliest window is taken. Windows are cut from one
segment's stored stream, so they can never cross a segment boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .indexstore import SegmentRecord

SNIPPET_WORDS = 30


@dataclass(frozen=True)
class Snippet:
    text: str
    window_start: int                       # segment-relative position of first word
    words: tuple[str, ...]                  # surfaces, <= 30
    highlights: tuple[int, ...]             # indices into words
    start_ms: int                           # time code of the first window word


def make_snippet(
    seg: SegmentRecord,
    matched: dict[str, list[tuple[int, int]]],
    width: int = SNIPPET_WORDS,
) -> Snippet:
    """Build the highlight window for one hit.

    ``matched`` maps each query term to its (position, start_ms) matches
    inside this segment; at least one position is required.
    """
    length = len(seg.words)
    positions: list[tuple[int, str]] = []
    for term, hits in matched.items():
        for position, _ in hits:
            if 0 <= position < length:
                positions.append((position, term))
    if not positions:
        raise ValueError("make_snippet requires at least one matched position")
    positions.sort()

    window = min(width, length)
    best_start = 0
    best_count = -1
    term_counts: dict[str, int] = {}
    lo = 0
    hi = 0
    for start in range(0, length - window + 1):
        end = start + window  # exclusive
        while hi < len(positions) and positions[hi][0] < end:
            term_counts[positions[hi][1]] = term_counts.get(positions[hi][1], 0) + 1
            hi += 1
        while lo < len(positions) and positions[lo][0] < start:
            term = positions[lo][1]
            term_counts[term] -= 1
            if not term_counts[term]:
                del term_counts[term]
            lo += 1
        distinct = len(term_counts)
        if distinct > best_count:
            best_count = distinct
            best_start = start

    in_window = sorted(
        {pos - best_start for pos, _ in positions if best_start <= pos < best_start + window}
    )
    words = tuple(w.surface for w in seg.words[best_start : best_start + window])
    return Snippet(
        text=" ".join(words),
        window_start=best_start,
        words=words,
        highlights=tuple(in_window),
        start_ms=seg.words[best_start].start_ms,
    )
