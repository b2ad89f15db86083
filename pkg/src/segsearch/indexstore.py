"""Segment-scoped inverted index with time-coded postings.

Terms are indexed at segment granularity under four namespaces: ``norm``
(exact casefolded surface, used by phrase queries), ``lemma`` (default
term matching), ``entity`` (canonical names), and ``term`` (multi-word
lemma phrases). Every posting carries the source word's media time code
and recognition confidence.

Concurrency model: one writer, many readers. Mutations stage into the
writer's private state; ``commit()`` publishes an immutable
:class:`IndexSnapshot` atomically, and readers keep whatever snapshot
they pinned.
"""

from __future__ import annotations

import hashlib
import io
import json
import struct
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .annotation import EntityMention, MultiWordTerm
from .errors import CorruptIndex, DuplicateDocument, StorageFull, VersionMismatch
from .lingproc import AnalyzedToken
from .model import EntityType, Segment, Transcript, format_utc, parse_utc

FORMAT_VERSION = 1

KIND_NORM = "norm"
KIND_LEMMA = "lemma"
KIND_ENTITY = "entity"
KIND_TERM = "term"
LOOKUP_ORDER = (KIND_LEMMA, KIND_NORM, KIND_ENTITY, KIND_TERM)


@dataclass(frozen=True)
class Posting:
    doc_id: str
    seg_index: int
    token_position: int
    start_ms: int
    confidence: float

    def sort_key(self):
        return (self.doc_id, self.seg_index, self.token_position)


@dataclass(frozen=True)
class StoredWord:
    norm: str
    surface: str
    start_ms: int


@dataclass(frozen=True)
class SegmentRecord:
    """Everything needed to render one retrievable segment."""

    doc_id: str
    seg_index: int
    air_date: datetime
    source: str
    language: str
    time_range: tuple[int, int]
    keywords: tuple[tuple[str, float], ...]
    entities: tuple[EntityMention, ...]
    word_count: int
    words: tuple[StoredWord, ...]


@dataclass(frozen=True)
class DocRecord:
    doc_id: str
    media_url: str
    air_date: datetime
    source: str
    language: str
    segment_count: int


@dataclass
class FacetEntry:
    canonical: str
    type: EntityType
    lat: float | None
    lon: float | None
    seg_counts: dict[tuple[str, int], int]

    @property
    def total_mentions(self) -> int:
        return sum(self.seg_counts.values())

    @property
    def segments(self) -> set[tuple[str, int]]:
        return set(self.seg_counts.keys())


@dataclass(frozen=True)
class AddReceipt:
    doc_id: str
    segment_count: int
    posting_count: int
    committed: bool


class IndexSnapshot:
    """Immutable, consistent view of the index at one commit point."""

    def __init__(self, documents, segments, postings, facets):
        self._documents: dict[str, DocRecord] = documents
        self._segments: dict[tuple[str, int], SegmentRecord] = segments
        self._postings: dict[tuple[str, str], tuple[Posting, ...]] = postings
        self._facets: dict[EntityType, dict[str, FacetEntry]] = facets

    # -- documents ---------------------------------------------------------

    def doc(self, doc_id: str) -> DocRecord | None:
        return self._documents.get(doc_id)

    def doc_ids(self) -> list[str]:
        return sorted(self._documents.keys())

    def segment(self, doc_id: str, seg_index: int) -> SegmentRecord | None:
        return self._segments.get((doc_id, seg_index))

    def doc_segments(self, doc_id: str) -> list[SegmentRecord]:
        doc = self._documents.get(doc_id)
        if doc is None:
            return []
        return [self._segments[(doc_id, i)] for i in range(doc.segment_count)]

    def iter_segments(self):
        for key in sorted(self._segments.keys()):
            yield self._segments[key]

    # -- postings ----------------------------------------------------------

    def postings_for(self, kind: str, term: str) -> tuple[Posting, ...]:
        return self._postings.get((kind, term), ())

    def lookup(
        self, term: str, kind: str | None = None
    ) -> list[tuple[tuple[str, int], list[Posting]]]:
        """Postings for a norm, lemma, entity canonical, or multi-word term,
        grouped by (doc, segment) in deterministic order.

        With ``kind=None`` the namespaces are tried in the order lemma,
        norm, entity, term and the first non-empty one answers.
        """
        if kind is not None:
            key = term.casefold() if kind == KIND_ENTITY else term
            postings = self.postings_for(kind, key)
        else:
            postings = ()
            for candidate in LOOKUP_ORDER:
                key = term.casefold() if candidate == KIND_ENTITY else term
                postings = self.postings_for(candidate, key)
                if postings:
                    break
        groups: list[tuple[tuple[str, int], list[Posting]]] = []
        for p in postings:
            key = (p.doc_id, p.seg_index)
            if groups and groups[-1][0] == key:
                groups[-1][1].append(p)
            else:
                groups.append((key, [p]))
        return groups

    # -- facets and suggestions ---------------------------------------------

    def facet_entries(self, type: EntityType) -> dict[str, FacetEntry]:
        return self._facets.get(type, {})

    def all_facet_entries(self):
        for per_type in self._facets.values():
            yield from per_type.values()

    def suggest(self, prefix: str, limit: int) -> list[tuple[str, int]]:
        """Entity-name completions for a prefix.

        A canonical matches when any of its words starts with the
        casefolded prefix; results rank by total mention count, then
        lexicographically.
        """
        prefix = prefix.casefold()
        if not prefix or limit <= 0:
            return []
        matches: dict[str, int] = {}
        for per_type in self._facets.values():
            for entry in per_type.values():
                if any(w.startswith(prefix) for w in entry.canonical.casefold().split()):
                    matches[entry.canonical] = (
                        matches.get(entry.canonical, 0) + entry.total_mentions
                    )
        ranked = sorted(matches.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:limit]

    def stats(self) -> dict:
        per_kind: dict[str, int] = {}
        posting_count = 0
        for (kind, _), plist in self._postings.items():
            per_kind[kind] = per_kind.get(kind, 0) + 1
            posting_count += len(plist)
        return {
            "documents": len(self._documents),
            "segments": len(self._segments),
            "terms": per_kind,
            "postings": posting_count,
        }


class Index:
    """Mutable index container: stage documents, commit snapshots."""

    def __init__(self, max_documents: int | None = None):
        self._lock = threading.Lock()
        self._max_documents = max_documents
        self._documents: dict[str, DocRecord] = {}
        self._segments: dict[tuple[str, int], SegmentRecord] = {}
        self._postings: dict[tuple[str, str], tuple[Posting, ...]] = {}
        self._doc_posting_keys: dict[str, set[tuple[str, str]]] = {}
        self._facets: dict[EntityType, dict[str, FacetEntry]] = {}
        self._snapshot = IndexSnapshot({}, {}, {}, {})

    # -- reading -------------------------------------------------------------

    def snapshot(self) -> IndexSnapshot:
        return self._snapshot

    def has_document(self, doc_id: str) -> bool:
        with self._lock:
            return doc_id in self._documents

    # -- writing -------------------------------------------------------------

    def add_document(
        self,
        transcript: Transcript,
        segments: list[Segment],
        tokens: list[AnalyzedToken],
        mentions: list[EntityMention],
        terms: list[MultiWordTerm],
        replace: bool = False,
        commit: bool = True,
    ) -> AddReceipt:
        """Index one processed document.

        Postings are created for every norm and lemma token, every entity
        canonical, and every multi-word term. Re-adding the same doc_id
        with ``replace=True`` leaves the index in the same state as a
        single add. Changes become visible to readers at commit.
        """
        with self._lock:
            doc_id = transcript.doc_id
            if doc_id in self._documents:
                if not replace:
                    raise DuplicateDocument(doc_id)
                self._remove_locked(doc_id)
            elif (
                self._max_documents is not None
                and len(self._documents) >= self._max_documents
            ):
                raise StorageFull(
                    f"index capped at {self._max_documents} documents"
                )

            words = transcript.words()
            unit_of_ref = {}
            for tok in tokens:
                unit_of_ref[tok.word_ref] = tok.utterance_index

            mentions_by_seg: dict[int, list[EntityMention]] = {}
            for m in mentions:
                mentions_by_seg.setdefault(m.seg_index, []).append(m)

            new_postings: dict[tuple[str, str], list[Posting]] = {}
            posting_count = 0
            seg_pos_of_ref: dict[int, tuple[int, int]] = {}

            for seg in segments:
                first_unit, last_unit = seg.unit_range
                seg_tokens = [
                    tok for tok in tokens if first_unit <= tok.utterance_index <= last_unit
                ]
                stored = []
                position_of_ref: dict[int, int] = {}
                for position, tok in enumerate(seg_tokens):
                    word = words[tok.word_ref]
                    stored.append(
                        StoredWord(norm=tok.norm, surface=word.surface, start_ms=word.start_ms)
                    )
                    position_of_ref[tok.word_ref] = position
                    seg_pos_of_ref[tok.word_ref] = (seg.seg_index, position)
                    for kind, key in ((KIND_NORM, tok.norm), (KIND_LEMMA, tok.lemma)):
                        new_postings.setdefault((kind, key), []).append(
                            Posting(
                                doc_id=doc_id,
                                seg_index=seg.seg_index,
                                token_position=position,
                                start_ms=word.start_ms,
                                confidence=tok.confidence,
                            )
                        )
                        posting_count += 1

                for m in mentions_by_seg.get(seg.seg_index, ()):
                    first_ref, last_ref = m.token_span
                    span_confs = [
                        words[ref].confidence for ref in range(first_ref, last_ref + 1)
                    ]
                    new_postings.setdefault(
                        (KIND_ENTITY, m.canonical.casefold()), []
                    ).append(
                        Posting(
                            doc_id=doc_id,
                            seg_index=m.seg_index,
                            token_position=position_of_ref.get(first_ref, 0),
                            start_ms=m.start_ms,
                            confidence=sum(span_confs) / len(span_confs),
                        )
                    )
                    posting_count += 1

                self._segments[(doc_id, seg.seg_index)] = SegmentRecord(
                    doc_id=doc_id,
                    seg_index=seg.seg_index,
                    air_date=transcript.air_date,
                    source=transcript.source,
                    language=transcript.language,
                    time_range=seg.time_range,
                    keywords=tuple(seg.keywords),
                    entities=tuple(mentions_by_seg.get(seg.seg_index, ())),
                    word_count=len(stored),
                    words=tuple(stored),
                )

            for term in terms:
                for first_ref, start_ms in term.occurrences:
                    _, position = seg_pos_of_ref.get(first_ref, (term.seg_index, 0))
                    new_postings.setdefault((KIND_TERM, term.phrase), []).append(
                        Posting(
                            doc_id=doc_id,
                            seg_index=term.seg_index,
                            token_position=position,
                            start_ms=start_ms,
                            confidence=1.0,
                        )
                    )
                    posting_count += 1

            for key, plist in new_postings.items():
                plist.sort(key=Posting.sort_key)
                existing = self._postings.get(key, ())
                merged = sorted(list(existing) + plist, key=Posting.sort_key)
                self._postings[key] = tuple(merged)
            self._doc_posting_keys[doc_id] = set(new_postings.keys())

            for m in mentions:
                per_type = self._facets.setdefault(m.type, {})
                entry = per_type.get(m.canonical)
                if entry is None:
                    entry = FacetEntry(
                        canonical=m.canonical, type=m.type, lat=m.lat, lon=m.lon,
                        seg_counts={},
                    )
                    per_type[m.canonical] = entry
                if entry.lat is None and m.lat is not None:
                    entry.lat, entry.lon = m.lat, m.lon
                seg_key = (doc_id, m.seg_index)
                entry.seg_counts[seg_key] = entry.seg_counts.get(seg_key, 0) + 1

            self._documents[doc_id] = DocRecord(
                doc_id=doc_id,
                media_url=transcript.media_url,
                air_date=transcript.air_date,
                source=transcript.source,
                language=transcript.language,
                segment_count=len(segments),
            )

            if commit:
                self._publish_locked()
            return AddReceipt(
                doc_id=doc_id,
                segment_count=len(segments),
                posting_count=posting_count,
                committed=commit,
            )

    def commit(self) -> IndexSnapshot:
        with self._lock:
            self._publish_locked()
            return self._snapshot

    def _publish_locked(self) -> None:
        self._snapshot = IndexSnapshot(
            dict(self._documents),
            dict(self._segments),
            dict(self._postings),
            {
                etype: {
                    canonical: FacetEntry(
                        canonical=e.canonical, type=e.type, lat=e.lat, lon=e.lon,
                        seg_counts=dict(e.seg_counts),
                    )
                    for canonical, e in per_type.items()
                }
                for etype, per_type in self._facets.items()
            },
        )

    def _remove_locked(self, doc_id: str) -> None:
        doc = self._documents.pop(doc_id)
        for i in range(doc.segment_count):
            self._segments.pop((doc_id, i), None)
        for key in self._doc_posting_keys.pop(doc_id, set()):
            remaining = tuple(
                p for p in self._postings.get(key, ()) if p.doc_id != doc_id
            )
            if remaining:
                self._postings[key] = remaining
            else:
                self._postings.pop(key, None)
        for per_type in self._facets.values():
            for canonical in list(per_type.keys()):
                entry = per_type[canonical]
                entry.seg_counts = {
                    k: v for k, v in entry.seg_counts.items() if k[0] != doc_id
                }
                if not entry.seg_counts:
                    del per_type[canonical]

    # -- persistence -----------------------------------------------------------

    def persist(self, path: str | Path) -> None:
        """Write the committed state to a directory; see module docs for layout."""
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        snap = self._snapshot
        doc_order = snap.doc_ids()
        doc_ord = {doc_id: i for i, doc_id in enumerate(doc_order)}

        docs_payload = io.BytesIO()
        for doc_id in doc_order:
            doc = snap.doc(doc_id)
            record = {
                "doc": {
                    "doc_id": doc.doc_id,
                    "media_url": doc.media_url,
                    "air_date": format_utc(doc.air_date),
                    "source": doc.source,
                    "language": doc.language,
                    "segment_count": doc.segment_count,
                },
                "segments": [_segment_to_json(s) for s in snap.doc_segments(doc_id)],
            }
            docs_payload.write(json.dumps(record, ensure_ascii=False).encode("utf-8"))
            docs_payload.write(b"\n")

        postings_payload = _encode_postings(snap._postings, doc_ord)

        facets_payload = json.dumps(
            {
                etype.value: {
                    canonical: {
                        "lat": entry.lat,
                        "lon": entry.lon,
                        "segments": [
                            [doc_ord[d], s, c]
                            for (d, s), c in sorted(entry.seg_counts.items())
                        ],
                    }
                    for canonical, entry in sorted(per_type.items())
                }
                for etype, per_type in snap._facets.items()
            },
            ensure_ascii=False,
        ).encode("utf-8")

        files = {
            "docs.jsonl": docs_payload.getvalue(),
            "postings.bin": postings_payload,
            "facets.json": facets_payload,
        }
        manifest = {
            "format_version": FORMAT_VERSION,
            "documents": len(doc_order),
            "checksums": {
                name: hashlib.sha256(data).hexdigest() for name, data in files.items()
            },
        }
        for name, data in files.items():
            (path / name).write_bytes(data)
        (path / "manifest.json").write_text(
            json.dumps(manifest, indent=2), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path, max_documents: int | None = None) -> "Index":
        """Load a persisted index, verifying checksums and format version."""
        path = Path(path)
        manifest_path = path / "manifest.json"
        if not manifest_path.is_file():
            raise CorruptIndex(f"missing manifest: {manifest_path}")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptIndex(f"unreadable manifest: {exc}") from None
        version = manifest.get("format_version")
        if version != FORMAT_VERSION:
            raise VersionMismatch(
                f"index format {version}, this build reads {FORMAT_VERSION}"
            )
        blobs = {}
        for name, expected in manifest.get("checksums", {}).items():
            file_path = path / name
            if not file_path.is_file():
                raise CorruptIndex(f"missing index file: {name}")
            data = file_path.read_bytes()
            if hashlib.sha256(data).hexdigest() != expected:
                raise CorruptIndex(f"checksum mismatch in {name}")
            blobs[name] = data
        for required in ("docs.jsonl", "postings.bin", "facets.json"):
            if required not in blobs:
                raise CorruptIndex(f"manifest lists no {required}")

        index = cls(max_documents=max_documents)
        doc_order: list[str] = []
        try:
            for line in blobs["docs.jsonl"].splitlines():
                record = json.loads(line)
                doc = record["doc"]
                doc_order.append(doc["doc_id"])
                index._documents[doc["doc_id"]] = DocRecord(
                    doc_id=doc["doc_id"],
                    media_url=doc["media_url"],
                    air_date=parse_utc(doc["air_date"]),
                    source=doc["source"],
                    language=doc["language"],
                    segment_count=doc["segment_count"],
                )
                for seg_json in record["segments"]:
                    seg = _segment_from_json(seg_json)
                    index._segments[(seg.doc_id, seg.seg_index)] = seg
            index._postings = _decode_postings(blobs["postings.bin"], doc_order)
            facets_json = json.loads(blobs["facets.json"].decode("utf-8"))
            for etype_name, per_type in facets_json.items():
                etype = EntityType(etype_name)
                index._facets[etype] = {}
                for canonical, entry in per_type.items():
                    index._facets[etype][canonical] = FacetEntry(
                        canonical=canonical,
                        type=etype,
                        lat=entry["lat"],
                        lon=entry["lon"],
                        seg_counts={
                            (doc_order[d], s): c for d, s, c in entry["segments"]
                        },
                    )
        except (KeyError, ValueError, IndexError, struct.error) as exc:
            raise CorruptIndex(f"undecodable index data: {exc}") from None

        for doc_id, keys in _posting_keys_by_doc(index._postings).items():
            index._doc_posting_keys[doc_id] = keys
        index._publish_locked()
        return index

def verify_index(path: str | Path) -> dict:
    """Load-check a persisted directory: checksums, version, decodability."""
    index = Index.load(path)
    return {"ok": True, **index.snapshot().stats()}


# -- serialization helpers ----------------------------------------------------

def _segment_to_json(seg: SegmentRecord) -> dict:
    return {
        "doc_id": seg.doc_id,
        "seg_index": seg.seg_index,
        "air_date": format_utc(seg.air_date),
        "source": seg.source,
        "language": seg.language,
        "time_range": list(seg.time_range),
        "keywords": [[lemma, score] for lemma, score in seg.keywords],
        "entities": [
            {
                "canonical": m.canonical,
                "type": m.type.value,
                "surface": m.surface,
                "seg_index": m.seg_index,
                "token_span": list(m.token_span),
                "start_ms": m.start_ms,
                "lat": m.lat,
                "lon": m.lon,
            }
            for m in seg.entities
        ],
        "words": [[w.norm, w.surface, w.start_ms] for w in seg.words],
    }


def _segment_from_json(obj: dict) -> SegmentRecord:
    return SegmentRecord(
        doc_id=obj["doc_id"],
        seg_index=obj["seg_index"],
        air_date=parse_utc(obj["air_date"]),
        source=obj["source"],
        language=obj["language"],
        time_range=(obj["time_range"][0], obj["time_range"][1]),
        keywords=tuple((lemma, score) for lemma, score in obj["keywords"]),
        entities=tuple(
            EntityMention(
                canonical=m["canonical"],
                type=EntityType(m["type"]),
                surface=m["surface"],
                doc_id=obj["doc_id"],
                seg_index=m["seg_index"],
                token_span=(m["token_span"][0], m["token_span"][1]),
                start_ms=m["start_ms"],
                lat=m["lat"],
                lon=m["lon"],
            )
            for m in obj["entities"]
        ),
        word_count=len(obj["words"]),
        words=tuple(StoredWord(norm=n, surface=s, start_ms=ms) for n, s, ms in obj["words"]),
    )


def _write_varint(buf: io.BytesIO, value: int) -> None:
    if value < 0:
        raise ValueError("varints are unsigned")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.write(bytes([byte | 0x80]))
        else:
            buf.write(bytes([byte]))
            return


def _read_varint(view: memoryview, offset: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if offset >= len(view):
            raise ValueError("truncated varint")
        byte = view[offset]
        offset += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, offset
        shift += 7


MAGIC = b"SSIX"


def _encode_postings(
    postings: dict[tuple[str, str], tuple[Posting, ...]],
    doc_ord: dict[str, int],
) -> bytes:
    """Delta-encoded postings: per term, gaps over (doc ordinal, segment,
    position, start time), confidences as raw doubles."""
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", FORMAT_VERSION))
    keys = sorted(postings.keys())
    _write_varint(buf, len(keys))
    for kind, term in keys:
        encoded_key = f"{kind}\x00{term}".encode("utf-8")
        _write_varint(buf, len(encoded_key))
        buf.write(encoded_key)
        plist = postings[(kind, term)]
        _write_varint(buf, len(plist))
        prev_doc = prev_seg = prev_pos = prev_start = 0
        for p in plist:
            ordinal = doc_ord[p.doc_id]
            d_doc = ordinal - prev_doc
            _write_varint(buf, d_doc)
            if d_doc:
                prev_seg = prev_pos = prev_start = 0
            d_seg = p.seg_index - prev_seg
            _write_varint(buf, d_seg)
            if d_seg:
                prev_pos = prev_start = 0
            _write_varint(buf, p.token_position - prev_pos)
            _write_varint(buf, p.start_ms - prev_start)
            buf.write(struct.pack("<d", p.confidence))
            prev_doc, prev_seg = ordinal, p.seg_index
            prev_pos, prev_start = p.token_position, p.start_ms
    return buf.getvalue()


def _decode_postings(
    data: bytes, doc_order: list[str]
) -> dict[tuple[str, str], tuple[Posting, ...]]:
    view = memoryview(data)
    if bytes(view[:4]) != MAGIC:
        raise ValueError("bad postings magic")
    (version,) = struct.unpack("<I", view[4:8])
    if version != FORMAT_VERSION:
        raise ValueError(f"postings format {version}")
    offset = 8
    term_count, offset = _read_varint(view, offset)
    postings: dict[tuple[str, str], tuple[Posting, ...]] = {}
    for _ in range(term_count):
        key_len, offset = _read_varint(view, offset)
        raw_key = bytes(view[offset : offset + key_len]).decode("utf-8")
        offset += key_len
        kind, _, term = raw_key.partition("\x00")
        count, offset = _read_varint(view, offset)
        plist = []
        prev_doc = prev_seg = prev_pos = prev_start = 0
        for _ in range(count):
            d_doc, offset = _read_varint(view, offset)
            doc = prev_doc + d_doc
            if d_doc:
                prev_seg = prev_pos = prev_start = 0
            d_seg, offset = _read_varint(view, offset)
            seg = prev_seg + d_seg
            if d_seg:
                prev_pos = prev_start = 0
            d_pos, offset = _read_varint(view, offset)
            pos = prev_pos + d_pos
            d_start, offset = _read_varint(view, offset)
            start = prev_start + d_start
            (conf,) = struct.unpack("<d", view[offset : offset + 8])
            offset += 8
            plist.append(
                Posting(
                    doc_id=doc_order[doc],
                    seg_index=seg,
                    token_position=pos,
                    start_ms=start,
                    confidence=conf,
                )
            )
            prev_doc, prev_seg, prev_pos, prev_start = doc, seg, pos, start
        postings[(kind, term)] = tuple(plist)
    return postings


def _posting_keys_by_doc(postings) -> dict[str, set[tuple[str, str]]]:
    by_doc: dict[str, set[tuple[str, str]]] = {}
    for key, plist in postings.items():
        for p in plist:
            by_doc.setdefault(p.doc_id, set()).add(key)
    return by_doc
