"""Drives transcripts through parse, analyze, segment, annotate, index.

The staged worker path (fetch -> process -> index) caches each stage's
output in a spool directory and records progress on the task, so a
retried task resumes where the previous attempt died. The terminal index
write uses replace semantics, making the whole pipeline idempotent:
any at-least-once schedule converges to the single-clean-run index.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from . import codec
from .annotation import EntityMention, Gazetteer, MultiWordTerm, extract_entities, extract_terms
from .errors import SegsearchError, StaleLease
from .indexstore import AddReceipt, Index
from .lingproc import AnalyzedToken, LanguageResources, analyze, content_units
from .model import EntityType, Segment, SegmentEntity, Transcript, segment_time_range
from .segmentation import (
    CohesionParams,
    RelationTable,
    document_stats,
    label_keywords,
    segment_document,
)
from .taskqueue import (
    STAGE_FETCH,
    STAGE_INDEX,
    STAGE_PROCESS,
    TaskQueue,
)

logger = logging.getLogger(__name__)


class StageFailure(SegsearchError):
    def __init__(self, reason: str, fatal: bool = False):
        super().__init__(reason)
        self.reason = reason
        self.fatal = fatal


@dataclass
class ProcessedDoc:
    """Everything the index needs for one document."""

    transcript: Transcript
    segments: list[Segment]
    tokens: list[AnalyzedToken]
    mentions: list[EntityMention]
    terms: list[MultiWordTerm]


class Pipeline:
    """Shared processing context: resources, gazetteers, parameters, index."""

    def __init__(
        self,
        index: Index,
        params: CohesionParams | None = None,
        relations: RelationTable | None = None,
        resources: dict[str, LanguageResources] | None = None,
        gazetteers: dict[str, Gazetteer] | None = None,
        spool_dir: str | Path | None = None,
    ):
        self.index = index
        self.params = params or CohesionParams()
        self.relations = relations
        self._resources = resources or {}
        self._gazetteers = gazetteers or {}
        self.spool_dir = Path(spool_dir) if spool_dir else None
        if self.spool_dir:
            self.spool_dir.mkdir(parents=True, exist_ok=True)

    def resources_for(self, language: str) -> LanguageResources:
        if language not in self._resources:
            self._resources[language] = LanguageResources.bundled(language)
        return self._resources[language]

    def gazetteer_for(self, language: str) -> Gazetteer:
        if language not in self._gazetteers:
            import importlib.resources

            path = Path(
                str(importlib.resources.files("segsearch") / "resources" / "gazetteers" / f"{language}.tsv")
            )
            if path.is_file():
                self._gazetteers[language] = Gazetteer.load(path, language)
            else:
                self._gazetteers[language] = Gazetteer(language)
        return self._gazetteers[language]

    # -- processing ------------------------------------------------------------

    def process_transcript(self, transcript: Transcript) -> ProcessedDoc:
        """Analyze, segment, label, and annotate one parsed transcript."""
        resources = self.resources_for(transcript.language)
        gazetteer = self.gazetteer_for(transcript.language)
        tokens = analyze(transcript, resources)
        words = transcript.words()
        units = content_units(tokens, len(transcript.utterances))
        doc_counts, k, doc_length = document_stats(units, self.params)
        result = segment_document(units, k, self.params, self.relations)
        ranges = result.unit_ranges()

        mentions = extract_entities(tokens, words, ranges, transcript.doc_id, gazetteer)
        mentions_by_seg: dict[int, list[EntityMention]] = {}
        for m in mentions:
            mentions_by_seg.setdefault(m.seg_index, []).append(m)

        segments: list[Segment] = []
        terms: list[MultiWordTerm] = []
        for i, (first, last) in enumerate(ranges):
            seg_seq = [w for unit in range(first, last + 1) for w in units[unit]]
            keywords = label_keywords(seg_seq, doc_counts, k, doc_length, self.params)
            segments.append(
                Segment(
                    doc_id=transcript.doc_id,
                    seg_index=i,
                    unit_range=(first, last),
                    time_range=segment_time_range(transcript, first, last),
                    keywords=tuple(keywords),
                    entities=tuple(
                        SegmentEntity(surface=m.surface, type=m.type, lat=m.lat, lon=m.lon)
                        for m in mentions_by_seg.get(i, ())
                    ),
                )
            )
            seg_tokens = [t for t in tokens if first <= t.utterance_index <= last]
            terms.extend(extract_terms(seg_tokens, words, i))

        return ProcessedDoc(
            transcript=transcript,
            segments=segments,
            tokens=tokens,
            mentions=mentions,
            terms=terms,
        )

    def index_processed(self, doc: ProcessedDoc, commit: bool = True) -> AddReceipt:
        return self.index.add_document(
            doc.transcript,
            doc.segments,
            doc.tokens,
            doc.mentions,
            doc.terms,
            replace=True,
            commit=commit,
        )

    def run_item(self, data: bytes | str, commit: bool = True) -> AddReceipt:
        """Parse raw transcript bytes and drive them all the way into the index."""
        transcript = codec.parse_transcript(data)
        return self.index_processed(self.process_transcript(transcript), commit=commit)


class Worker:
    """One queue consumer. ``step()`` advances by a single stage so tests can
    interleave, kill, and restart workers deterministically."""

    def __init__(self, worker_id: str, queue: TaskQueue, pipeline: Pipeline):
        self.worker_id = worker_id
        self.queue = queue
        self.pipeline = pipeline
        self.current = None
        if pipeline.spool_dir is None:
            raise ValueError("worker needs a pipeline with a spool directory")

    def step(self) -> bool:
        """Lease or advance one stage; returns False when there is no work."""
        if self.current is None:
            self.current = self.queue.lease(self.worker_id)
            return self.current is not None
        task = self.current
        try:
            if task.stage == STAGE_FETCH:
                cache = self._fetch(task)
                self.queue.advance_stage(self.worker_id, task.task_id, STAGE_PROCESS, cache)
                task.stage = STAGE_PROCESS
                task.payload.update(cache)
            elif task.stage == STAGE_PROCESS:
                cache = self._process(task)
                self.queue.advance_stage(self.worker_id, task.task_id, STAGE_INDEX, cache)
                task.stage = STAGE_INDEX
                task.payload.update(cache)
            elif task.stage == STAGE_INDEX:
                self._index(task)
                self.queue.complete(self.worker_id, task.task_id)
                self.current = None
            else:
                raise StageFailure(f"unknown stage {task.stage!r}", fatal=True)
        except StaleLease:
            logger.info("worker %s lost lease on %s", self.worker_id, task.task_id)
            self.current = None
        except StageFailure as exc:
            self._report_failure(task, exc.reason, exc.fatal)
        except SegsearchError as exc:
            self._report_failure(task, f"{type(exc).__name__}: {exc}", False)
        return True

    def run_until_idle(self) -> int:
        steps = 0
        while self.step():
            steps += 1
        return steps

    def _report_failure(self, task, reason: str, fatal: bool) -> None:
        try:
            self.queue.fail(self.worker_id, task.task_id, reason, fatal=fatal)
        except StaleLease:
            pass
        self.current = None

    # -- stages -------------------------------------------------------------

    def _spool_path(self, task_id: str, suffix: str) -> Path:
        return self.pipeline.spool_dir / f"{task_id}.{suffix}"

    def _fetch(self, task) -> dict:
        payload = task.payload
        path = self._spool_path(task.task_id, "transcript")
        if not path.exists():
            data = self._resolve_transcript(payload)
            path.write_bytes(data)
        return {"transcript_path": str(path)}

    def _resolve_transcript(self, payload: dict) -> bytes:
        if payload.get("inline") is not None:
            return payload["inline"].encode("utf-8")
        if payload.get("transcript_path"):
            local = Path(payload["transcript_path"])
            if not local.is_file():
                raise StageFailure(f"transcript file missing: {local}")
            return local.read_bytes()
        url = payload.get("transcript_url")
        if not url:
            raise StageFailure("item has no transcript (media-only feed entry)", fatal=True)
        if url.startswith("file://") or "://" not in url:
            local = Path(url[len("file://"):] if url.startswith("file://") else url)
            if not local.is_file():
                raise StageFailure(f"transcript file missing: {local}")
            return local.read_bytes()
        try:
            with urllib.request.urlopen(url, timeout=60) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError) as exc:
            raise StageFailure(f"transcript fetch failed: {exc}") from None

    def _process(self, task) -> dict:
        out_path = self._spool_path(task.task_id, "processed.json")
        if not out_path.exists():
            raw = self._resolve_transcript(task.payload)
            transcript = codec.parse_transcript(raw)
            doc = self.pipeline.process_transcript(transcript)
            out_path.write_text(processed_to_json(doc), encoding="utf-8")
        return {"processed_path": str(out_path)}

    def _index(self, task) -> None:
        doc = processed_from_json(
            Path(task.payload["processed_path"]).read_text(encoding="utf-8")
        )
        self.pipeline.index_processed(doc)


class WorkerThread(threading.Thread):
    """Daemon loop around :class:`Worker` for live services."""

    def __init__(self, worker: Worker, idle_sleep: float = 0.2):
        super().__init__(daemon=True, name=f"worker-{worker.worker_id}")
        self.worker = worker
        self.idle_sleep = idle_sleep
        self._stop = threading.Event()

    def run(self) -> None:
        while not self._stop.is_set():
            try:
                if not self.worker.step():
                    self._stop.wait(self.idle_sleep)
            except Exception:
                logger.exception("worker %s crashed; continuing", self.worker.worker_id)
                self.worker.current = None

    def stop(self) -> None:
        self._stop.set()


# -- processed-document serialization (spool cache format) ---------------------

def processed_to_json(doc: ProcessedDoc) -> str:
    return json.dumps(
        {
            "transcript": json.loads(codec.serialize_transcript(doc.transcript, form="json")),
            "segments": [
                {
                    "seg_index": s.seg_index,
                    "unit_range": list(s.unit_range),
                    "time_range": list(s.time_range),
                    "keywords": [[l, v] for l, v in s.keywords],
                    "entities": [
                        {"surface": e.surface, "type": e.type.value, "lat": e.lat, "lon": e.lon}
                        for e in s.entities
                    ],
                }
                for s in doc.segments
            ],
            "tokens": [
                [t.word_ref, t.utterance_index, t.norm, t.lemma, t.pos, t.is_content, t.confidence]
                for t in doc.tokens
            ],
            "mentions": [
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
                for m in doc.mentions
            ],
            "terms": [
                {
                    "phrase": t.phrase,
                    "seg_index": t.seg_index,
                    "count": t.count,
                    "occurrences": [list(o) for o in t.occurrences],
                }
                for t in doc.terms
            ],
        },
        ensure_ascii=False,
    )


def processed_from_json(text: str) -> ProcessedDoc:
    obj = json.loads(text)
    transcript = codec.parse_transcript(json.dumps(obj["transcript"], ensure_ascii=False))
    segments = [
        Segment(
            doc_id=transcript.doc_id,
            seg_index=s["seg_index"],
            unit_range=(s["unit_range"][0], s["unit_range"][1]),
            time_range=(s["time_range"][0], s["time_range"][1]),
            keywords=tuple((l, v) for l, v in s["keywords"]),
            entities=tuple(
                SegmentEntity(
                    surface=e["surface"], type=EntityType(e["type"]), lat=e["lat"], lon=e["lon"]
                )
                for e in s["entities"]
            ),
        )
        for s in obj["segments"]
    ]
    tokens = [
        AnalyzedToken(
            word_ref=ref, utterance_index=unit, norm=norm, lemma=lemma,
            pos=pos, is_content=is_content, confidence=conf,
        )
        for ref, unit, norm, lemma, pos, is_content, conf in obj["tokens"]
    ]
    mentions = [
        EntityMention(
            canonical=m["canonical"],
            type=EntityType(m["type"]),
            surface=m["surface"],
            doc_id=transcript.doc_id,
            seg_index=m["seg_index"],
            token_span=(m["token_span"][0], m["token_span"][1]),
            start_ms=m["start_ms"],
            lat=m["lat"],
            lon=m["lon"],
        )
        for m in obj["mentions"]
    ]
    terms = [
        MultiWordTerm(
            phrase=t["phrase"],
            seg_index=t["seg_index"],
            count=t["count"],
            occurrences=tuple((a, b) for a, b in t["occurrences"]),
        )
        for t in obj["terms"]
    ]
    return ProcessedDoc(
        transcript=transcript, segments=segments, tokens=tokens,
        mentions=mentions, terms=terms,
    )
