"""Segment-scoped query evaluation over a pinned index snapshot.

A segment is a hit iff the boolean tree is satisfied by that segment
alone. Hits score by confidence-weighted term frequency (sum over
positive terms of match count times mean posting confidence), breaking
ties by recency, then (doc_id, seg_index). Facet counts and the daily
histogram are computed over the full match set, not the returned page.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .indexstore import (
    KIND_ENTITY,
    KIND_LEMMA,
    KIND_NORM,
    IndexSnapshot,
    Posting,
    SegmentRecord,
)
from .model import EntityType
from .query_parser import (
    And,
    DateRange,
    FacetFilter,
    LanguageFilter,
    Node,
    Not,
    Or,
    Phrase,
    SourceFilter,
    Term,
    positive_leaves,
)
from .snippets import Snippet, make_snippet

SegKey = tuple[str, int]


@dataclass(frozen=True)
class Hit:
    doc_id: str
    seg_index: int
    score: float
    air_date: datetime
    media_url: str
    time_range: tuple[int, int]
    matched: dict[str, list[tuple[int, int]]]  # term -> [(position, start_ms)]
    snippet: Snippet | None


@dataclass
class QueryResult:
    total: int
    hits: list[Hit]
    facets: dict[str, list[tuple[str, int]]]
    histogram: list[tuple[str, int]]  # (YYYY-MM-DD, count), ascending
    matches: list[SegKey] = field(default_factory=list)


def execute(
    snapshot: IndexSnapshot,
    query: Node,
    limit: int = 10,
    offset: int = 0,
    snippet_width: int = 30,
) -> QueryResult:
    """Evaluate a parsed query and assemble the ranked, faceted result."""
    evaluator = _Evaluator(snapshot, query)
    matches = evaluator.match_set()

    scored: list[tuple[tuple, SegKey, dict]] = []
    for key in matches:
        seg = snapshot.segment(*key)
        matched_terms = evaluator.matched_positions(key)
        score = evaluator.score(key)
        sort_key = (-score, -seg.air_date.timestamp(), key[0], key[1])
        scored.append((sort_key, key, matched_terms))
    scored.sort(key=lambda item: item[0])

    page = scored[offset : offset + limit] if limit >= 0 else scored[offset:]
    hits = []
    for sort_key, key, matched_terms in page:
        seg = snapshot.segment(*key)
        doc = snapshot.doc(key[0])
        snippet = None
        if any(matched_terms.values()):
            snippet = make_snippet(seg, matched_terms, width=snippet_width)
        hits.append(
            Hit(
                doc_id=key[0],
                seg_index=key[1],
                score=-sort_key[0],
                air_date=seg.air_date,
                media_url=doc.media_url if doc else "",
                time_range=seg.time_range,
                matched=matched_terms,
                snippet=snippet,
            )
        )

    return QueryResult(
        total=len(scored),
        hits=hits,
        facets=_facet_counts(snapshot, matches),
        histogram=_histogram(snapshot, matches),
        matches=[key for _, key, _ in scored],
    )


def _facet_counts(
    snapshot: IndexSnapshot, matches: set[SegKey]
) -> dict[str, list[tuple[str, int]]]:
    """Per facet type: matching-segment counts per canonical, ranked."""
    out: dict[str, list[tuple[str, int]]] = {}
    for etype in EntityType:
        rows = []
        for canonical, entry in snapshot.facet_entries(etype).items():
            count = len(entry.segments & matches)
            if count:
                rows.append((canonical, count))
        rows.sort(key=lambda row: (-row[1], row[0]))
        out[etype.value] = rows
    return out


def _histogram(snapshot: IndexSnapshot, matches: set[SegKey]) -> list[tuple[str, int]]:
    buckets: dict[str, int] = {}
    for key in matches:
        seg = snapshot.segment(*key)
        day = seg.air_date.astimezone(timezone.utc).date().isoformat()
        buckets[day] = buckets.get(day, 0) + 1
    return sorted(buckets.items())


def geo_facet(
    snapshot: IndexSnapshot, matches: list[SegKey] | set[SegKey]
) -> list[tuple[str, float, float, int]]:
    """Located place facets of a match set: (canonical, lat, lon, segment count).

    Entries without coordinates are excluded here but still appear in the
    plain facet counts.
    """
    match_set = set(matches)
    rows = []
    for canonical, entry in snapshot.facet_entries(EntityType.LOCATION).items():
        if entry.lat is None or entry.lon is None:
            continue
        count = len(entry.segments & match_set)
        if count:
            rows.append((canonical, entry.lat, entry.lon, count))
    rows.sort(key=lambda row: (-row[3], row[0]))
    return rows


def compute_trends(
    snapshot: IndexSnapshot,
    period_start: datetime,
    period_end: datetime,
    facet_type: EntityType,
    top_n: int = 10,
) -> list[tuple[str, int]]:
    """Mention counts of one facet type over all segments aired in the
    period, descending, ties lexicographic."""
    counts: dict[str, int] = {}
    for canonical, entry in snapshot.facet_entries(facet_type).items():
        total = 0
        for (doc_id, seg_index), mention_count in entry.seg_counts.items():
            seg = snapshot.segment(doc_id, seg_index)
            if seg and period_start <= seg.air_date <= period_end:
                total += mention_count
        if total:
            counts[canonical] = total
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:top_n]


class _Evaluator:
    """Per-query working state: candidate generation plus per-segment checks."""

    def __init__(self, snapshot: IndexSnapshot, query: Node):
        self.snapshot = snapshot
        self.query = query
        self._term_groups: dict[str, dict[SegKey, list[Posting]]] = {}
        self._phrase_groups: dict[tuple[str, ...], dict[SegKey, list[tuple[int, int, float]]]] = {}
        self._facet_segments: dict[tuple[EntityType, str], set[SegKey]] = {}
        self._prepare(query)

    # -- preparation ---------------------------------------------------------

    def _prepare(self, node: Node) -> None:
        if isinstance(node, Term):
            if node.lemma not in self._term_groups:
                groups: dict[SegKey, list[Posting]] = {}
                for key, plist in self.snapshot.lookup(node.lemma, KIND_LEMMA):
                    groups[key] = plist
                self._term_groups[node.lemma] = groups
        elif isinstance(node, Phrase):
            if node.norms not in self._phrase_groups:
                self._phrase_groups[node.norms] = self._find_phrase(node.norms)
        elif isinstance(node, FacetFilter):
            fkey = (node.type, node.canonical.casefold())
            if fkey not in self._facet_segments:
                segs: set[SegKey] = set()
                for canonical, entry in self.snapshot.facet_entries(node.type).items():
                    if canonical.casefold() == fkey[1]:
                        segs |= entry.segments
                self._facet_segments[fkey] = segs
        elif isinstance(node, Not):
            self._prepare(node.child)
        elif isinstance(node, (And, Or)):
            for child in node.children:
                self._prepare(child)

    def _find_phrase(
        self, norms: tuple[str, ...]
    ) -> dict[SegKey, list[tuple[int, int, float]]]:
        """Occurrences of consecutive norm matches: (start position, start_ms,
        mean word confidence) per segment."""
        per_word: list[dict[SegKey, dict[int, Posting]]] = []
        for norm in norms:
            by_seg: dict[SegKey, dict[int, Posting]] = {}
            for p in self.snapshot.postings_for(KIND_NORM, norm):
                by_seg.setdefault((p.doc_id, p.seg_index), {})[p.token_position] = p
            per_word.append(by_seg)
        if not per_word:
            return {}
        candidates = set(per_word[0].keys())
        for by_seg in per_word[1:]:
            candidates &= set(by_seg.keys())
        occurrences: dict[SegKey, list[tuple[int, int, float]]] = {}
        for key in candidates:
            found = []
            first_positions = per_word[0][key]
            for start_pos, first_posting in sorted(first_positions.items()):
                chain = [first_posting]
                for step, by_seg in enumerate(per_word[1:], start=1):
                    nxt = by_seg[key].get(start_pos + step)
                    if nxt is None:
                        chain = None
                        break
                    chain.append(nxt)
                if chain is not None:
                    mean_conf = sum(p.confidence for p in chain) / len(chain)
                    found.append((start_pos, first_posting.start_ms, mean_conf))
            if found:
                occurrences[key] = found
        return occurrences

    # -- match set -------------------------------------------------------------

    def match_set(self) -> set[SegKey]:
        candidates = self._candidates()
        return {key for key in candidates if self._eval(self.query, key)}

    def _candidates(self) -> set[SegKey]:
        leaves = positive_leaves(self.query)
        keys: set[SegKey] = set()
        anchored = False
        for leaf in leaves:
            if isinstance(leaf, Term):
                keys |= set(self._term_groups[leaf.lemma].keys())
                anchored = True
            elif isinstance(leaf, Phrase):
                keys |= set(self._phrase_groups[leaf.norms].keys())
                anchored = True
            elif isinstance(leaf, FacetFilter):
                keys |= self._facet_segments[(leaf.type, leaf.canonical.casefold())]
                anchored = True
        if not anchored:
            # filter-only or pure-negation query: scan everything
            keys = {(s.doc_id, s.seg_index) for s in self.snapshot.iter_segments()}
        return keys

    def _eval(self, node: Node, key: SegKey) -> bool:
        if isinstance(node, Term):
            return key in self._term_groups[node.lemma]
        if isinstance(node, Phrase):
            return key in self._phrase_groups[node.norms]
        if isinstance(node, FacetFilter):
            return key in self._facet_segments[(node.type, node.canonical.casefold())]
        if isinstance(node, DateRange):
            seg = self.snapshot.segment(*key)
            return node.start <= seg.air_date <= node.end
        if isinstance(node, SourceFilter):
            seg = self.snapshot.segment(*key)
            return seg.source == node.feed
        if isinstance(node, LanguageFilter):
            seg = self.snapshot.segment(*key)
            return seg.language == node.code
        if isinstance(node, Not):
            return not self._eval(node.child, key)
        if isinstance(node, And):
            return all(self._eval(child, key) for child in node.children)
        if isinstance(node, Or):
            return any(self._eval(child, key) for child in node.children)
        raise TypeError(f"unknown query node {node!r}")

    # -- per-hit details ---------------------------------------------------------

    def matched_positions(self, key: SegKey) -> dict[str, list[tuple[int, int]]]:
        """Positions and time codes per positive query term matching this segment."""
        out: dict[str, list[tuple[int, int]]] = {}
        for leaf in positive_leaves(self.query):
            if isinstance(leaf, Term):
                plist = self._term_groups[leaf.lemma].get(key)
                if plist:
                    out[leaf.lemma] = [(p.token_position, p.start_ms) for p in plist]
            elif isinstance(leaf, Phrase):
                occs = self._phrase_groups[leaf.norms].get(key)
                if occs:
                    label = " ".join(leaf.norms)
                    spans = []
                    for start_pos, start_ms, _ in occs:
                        spans.extend(
                            (start_pos + i, start_ms) for i in range(len(leaf.norms))
                        )
                    out[label] = spans
        return out

    def score(self, key: SegKey) -> float:
        total = 0.0
        for leaf in positive_leaves(self.query):
            if isinstance(leaf, Term):
                plist = self._term_groups[leaf.lemma].get(key)
                if plist:
                    mean_conf = sum(p.confidence for p in plist) / len(plist)
                    total += len(plist) * mean_conf
            elif isinstance(leaf, Phrase):
                occs = self._phrase_groups[leaf.norms].get(key)
                if occs:
                    mean_conf = sum(conf for _, _, conf in occs) / len(occs)
                    total += len(occs) * mean_conf
        return total
