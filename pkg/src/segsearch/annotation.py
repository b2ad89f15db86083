"""Named-entity and multi-word-term extraction over analyzed segments.

Entity recognition is gazetteer-driven: longest-match-first, left-to-right,
non-overlapping matching of casefolded surface phrases. Multi-word terms
are maximal adjective*-noun+ runs of at least two tokens.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .lingproc import AnalyzedToken, Pos
from .model import EntityType, TranscriptWord

MAX_PHRASE_TOKENS = 6


@dataclass(frozen=True)
class GazetteerEntry:
    canonical: str
    type: EntityType
    lat: float | None = None
    lon: float | None = None


class Gazetteer:
    """Casefolded phrase -> entity lookup for one language."""

    def __init__(self, language: str):
        self.language = language
        self._entries: dict[tuple[str, ...], GazetteerEntry] = {}
        self._max_len = 1

    def add(
        self,
        surface: str,
        type: EntityType | str,
        canonical: str | None = None,
        lat: float | None = None,
        lon: float | None = None,
    ) -> None:
        tokens = tuple(surface.casefold().split())
        if not 1 <= len(tokens) <= MAX_PHRASE_TOKENS:
            raise ValueError(f"phrase must be 1-{MAX_PHRASE_TOKENS} tokens: {surface!r}")
        if lat is not None and not -90.0 <= lat <= 90.0:
            raise ValueError(f"lat {lat} outside [-90,90]")
        if lon is not None and not -180.0 <= lon <= 180.0:
            raise ValueError(f"lon {lon} outside [-180,180]")
        entry = GazetteerEntry(
            canonical=canonical or surface,
            type=EntityType(type),
            lat=lat,
            lon=lon,
        )
        self._entries[tokens] = entry
        self._max_len = max(self._max_len, len(tokens))

    def phrase(self, tokens: tuple[str, ...]) -> GazetteerEntry | None:
        return self._entries.get(tokens)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def max_phrase_len(self) -> int:
        return self._max_len

    @classmethod
    def load(cls, path: str | Path, language: str | None = None) -> "Gazetteer":
        """Read ``surface TAB type TAB canonical TAB lat,lon`` lines; the
        last two fields are optional."""
        path = Path(path)
        gaz = cls(language or path.stem)
        for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}:{line_no}: expected at least 2 fields")
            surface, etype = parts[0], parts[1]
            canonical = parts[2] if len(parts) > 2 and parts[2] else surface
            lat = lon = None
            if len(parts) > 3 and parts[3]:
                lat_s, lon_s = parts[3].split(",")
                lat, lon = float(lat_s), float(lon_s)
            gaz.add(surface, etype, canonical, lat, lon)
        return gaz


@dataclass(frozen=True)
class EntityMention:
    canonical: str
    type: EntityType
    surface: str
    doc_id: str
    seg_index: int
    token_span: tuple[int, int]  # [first, last] word_ref, inclusive
    start_ms: int
    lat: float | None = None
    lon: float | None = None


@dataclass(frozen=True)
class MultiWordTerm:
    """A lemma phrase with its per-segment occurrence count and positions."""

    phrase: str
    seg_index: int
    count: int
    occurrences: tuple[tuple[int, int], ...]  # (first word_ref, start_ms)


def extract_entities(
    tokens: list[AnalyzedToken],
    words: list[TranscriptWord],
    segment_ranges: list[tuple[int, int]],
    doc_id: str,
    gazetteer: Gazetteer,
) -> list[EntityMention]:
    """Match gazetteer phrases inside each segment.

    ``segment_ranges`` are inclusive utterance ranges; mentions never cross
    a segment boundary. Matching is greedy: at each token the longest
    matching phrase wins and scanning resumes after it.
    """
    mentions: list[EntityMention] = []
    if not tokens:
        return mentions
    by_unit: dict[int, list[AnalyzedToken]] = {}
    for tok in tokens:
        by_unit.setdefault(tok.utterance_index, []).append(tok)

    for seg_index, (first_unit, last_unit) in enumerate(segment_ranges):
        seg_tokens = [
            tok
            for unit in range(first_unit, last_unit + 1)
            for tok in by_unit.get(unit, [])
        ]
        i = 0
        while i < len(seg_tokens):
            hit = None
            hit_len = 0
            limit = min(gazetteer.max_phrase_len, len(seg_tokens) - i)
            for length in range(limit, 0, -1):
                phrase = tuple(t.norm for t in seg_tokens[i : i + length])
                entry = gazetteer.phrase(phrase)
                if entry is not None:
                    hit = entry
                    hit_len = length
                    break
            if hit is None:
                i += 1
                continue
            span_tokens = seg_tokens[i : i + hit_len]
            first_ref = span_tokens[0].word_ref
            last_ref = span_tokens[-1].word_ref
            mentions.append(
                EntityMention(
                    canonical=hit.canonical,
                    type=hit.type,
                    surface=" ".join(words[t.word_ref].surface for t in span_tokens),
                    doc_id=doc_id,
                    seg_index=seg_index,
                    token_span=(first_ref, last_ref),
                    start_ms=words[first_ref].start_ms,
                    lat=hit.lat,
                    lon=hit.lon,
                )
            )
            i += hit_len
    return mentions


def extract_terms(
    seg_tokens: list[AnalyzedToken],
    words: list[TranscriptWord],
    seg_index: int,
) -> list[MultiWordTerm]:
    """Multi-word terms of one segment: maximal adjective*-noun+ runs of
    two or more tokens, emitted as casefolded lemma phrases with counts.

    Stopwords and utterance boundaries break runs; a modal verb or any
    other non-matching tag does too.
    """
    runs: list[list[AnalyzedToken]] = []
    current: list[AnalyzedToken] = []
    seen_noun = False

    def close():
        nonlocal current, seen_noun
        if seen_noun and len(current) >= 2:
            runs.append(current)
        current = []
        seen_noun = False

    prev_unit: int | None = None
    for tok in seg_tokens:
        if prev_unit is not None and tok.utterance_index != prev_unit:
            close()
        prev_unit = tok.utterance_index
        if tok.pos == Pos.ADJECTIVE and tok.is_content and not seen_noun:
            current.append(tok)
        elif tok.pos == Pos.NOUN and tok.is_content:
            current.append(tok)
            seen_noun = True
        else:
            close()
            if tok.pos == Pos.ADJECTIVE and tok.is_content:
                current.append(tok)
    close()

    grouped: dict[str, list[tuple[int, int]]] = {}
    for run in runs:
        phrase = " ".join(t.lemma for t in run)
        first = run[0].word_ref
        grouped.setdefault(phrase, []).append((first, words[first].start_ms))
    return [
        MultiWordTerm(
            phrase=phrase,
            seg_index=seg_index,
            count=len(occs),
            occurrences=tuple(occs),
        )
        for phrase, occs in grouped.items()
    ]
