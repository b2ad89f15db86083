"""Stateless HTTP/JSON service over a pinned index snapshot.

Response shapes are frozen as JSON Schemas under ``segsearch/schemas`` so
the browser UI can be developed and contract-tested against them without
this process running. Handlers only read the current snapshot; ingestion
goes through the task queue.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field as dataclass_field

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from . import codec
from .errors import (
    MalformedInput,
    QuerySyntaxError,
    TranslatorUnavailable,
    UnsupportedPair,
)
from .indexstore import Index
from .model import EntityType, format_utc, parse_utc
from .pipeline import Pipeline, Worker, WorkerThread
from .query_engine import Hit, compute_trends, execute, geo_facet
from .query_parser import (
    And,
    DateRange,
    FacetFilter,
    LanguageFilter,
    Node,
    SourceFilter,
    parse_query,
)
from .taskqueue import STAGE_PROCESS, TaskQueue
from .translate import DictionaryTranslator, translate_query

logger = logging.getLogger(__name__)

FACET_PARAM_TYPES = {
    "person": EntityType.PERSON,
    "location": EntityType.LOCATION,
    "org": EntityType.ORGANIZATION,
    "organization": EntityType.ORGANIZATION,
    "event": EntityType.EVENT,
}


@dataclass
class ApiConfig:
    bind: str = "127.0.0.1:8080"
    index_path: str | None = None
    feed_config_path: str | None = None
    page_size: int = 10
    cors_allow: list[str] = dataclass_field(default_factory=list)

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")


def create_app(
    index: Index | None,
    queue: TaskQueue | None = None,
    pipeline: Pipeline | None = None,
    translator=None,
    config: ApiConfig | None = None,
    run_worker: bool = False,
    ui_dir: str | None = None,
) -> FastAPI:
    config = config or ApiConfig()
    if translator is None:
        translator = DictionaryTranslator()

    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if run_worker and queue is not None and pipeline is not None:
            app.state.worker_thread = WorkerThread(Worker("api-worker", queue, pipeline))
            app.state.worker_thread.start()
        yield
        if app.state.worker_thread is not None:
            app.state.worker_thread.stop()

    app = FastAPI(title="segsearch", version="0.1.0", lifespan=lifespan)
    app.state.index = index
    app.state.queue = queue
    app.state.pipeline = pipeline
    app.state.translator = translator
    app.state.config = config
    app.state.worker_thread = None

    if config.cors_allow:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_allow,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    # -- search ---------------------------------------------------------------

    @app.get("/search")
    def search(
        request: Request,
        q: str,
        lang: str | None = None,
        from_: str | None = Query(default=None, alias="from"),
        to: str | None = None,
        limit: int | None = None,
        offset: int = 0,
    ):
        snapshot = _snapshot_or_503(app)
        if isinstance(snapshot, Response):
            return snapshot
        try:
            ast = _build_ast(q, lang, from_, to, request.query_params.getlist("facets"))
        except QuerySyntaxError as exc:
            return JSONResponse(
                status_code=400, content={"error": exc.reason, "offset": exc.offset}
            )
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc), "offset": 0})
        result = execute(
            snapshot, ast, limit=limit if limit is not None else config.page_size,
            offset=offset,
        )
        return {
            "total": result.total,
            "hits": [_hit_json(h) for h in result.hits],
            "facets": {
                ftype: [{"value": v, "count": c} for v, c in rows]
                for ftype, rows in result.facets.items()
            },
            "geo": [
                {"value": v, "lat": lat, "lon": lon, "count": c}
                for v, lat, lon, c in geo_facet(snapshot, result.matches)
            ],
            "histogram": [{"day": day, "count": c} for day, c in result.histogram],
        }

    @app.get("/search/xlingual")
    def search_xlingual(
        request: Request,
        q: str,
        src: str,
        tgt: str,
        limit: int | None = None,
        offset: int = 0,
        back: int = 0,
    ):
        snapshot = _snapshot_or_503(app)
        if isinstance(snapshot, Response):
            return snapshot
        try:
            translated = translate_query(q, src, tgt, app.state.translator)
        except UnsupportedPair as exc:
            return JSONResponse(status_code=400, content={"error": f"unsupported pair: {exc}"})
        except TranslatorUnavailable as exc:
            return JSONResponse(status_code=502, content={"error": str(exc)})
        try:
            ast = _build_ast(translated, tgt, None, None, [])
            ast = And(children=(ast, LanguageFilter(code=tgt)))
        except QuerySyntaxError as exc:
            return JSONResponse(
                status_code=400, content={"error": exc.reason, "offset": exc.offset}
            )
        result = execute(
            snapshot, ast, limit=limit if limit is not None else config.page_size,
            offset=offset,
        )
        hits = []
        for h in result.hits:
            payload = _hit_json(h)
            if back and h.snippet is not None:
                try:
                    payload["snippet"]["back_translation"] = app.state.translator.translate(
                        h.snippet.text, tgt, src
                    )
                except UnsupportedPair:
                    pass
            hits.append(payload)
        return {
            "query": q,
            "translated_query": translated,
            "src": src,
            "tgt": tgt,
            "total": result.total,
            "hits": hits,
            "facets": {
                ftype: [{"value": v, "count": c} for v, c in rows]
                for ftype, rows in result.facets.items()
            },
            "geo": [
                {"value": v, "lat": lat, "lon": lon, "count": c}
                for v, lat, lon, c in geo_facet(snapshot, result.matches)
            ],
            "histogram": [{"day": day, "count": c} for day, c in result.histogram],
        }

    # -- browse ---------------------------------------------------------------

    @app.get("/trends")
    def trends(
        from_: str = Query(alias="from"),
        to: str = "",
        type: str = "event",
        n: int = 10,
    ):
        snapshot = _snapshot_or_503(app)
        if isinstance(snapshot, Response):
            return snapshot
        etype = FACET_PARAM_TYPES.get(type)
        if etype is None:
            return JSONResponse(status_code=400, content={"error": f"unknown facet type {type!r}"})
        try:
            start = parse_utc(from_ if "T" in from_ else from_ + "T00:00:00Z")
            end = parse_utc(to if "T" in to else to + "T23:59:59Z") if to else None
        except ValueError:
            return JSONResponse(status_code=400, content={"error": "bad date"})
        if end is None:
            return JSONResponse(status_code=400, content={"error": "missing 'to'"})
        rows = compute_trends(snapshot, start, end, etype, top_n=n)
        return {
            "type": type,
            "from": from_,
            "to": to,
            "trends": [{"value": v, "count": c} for v, c in rows],
        }

    @app.get("/suggest")
    def suggest(prefix: str, n: int = 10):
        snapshot = _snapshot_or_503(app)
        if isinstance(snapshot, Response):
            return snapshot
        return {
            "prefix": prefix,
            "suggestions": [
                {"value": v, "count": c} for v, c in snapshot.suggest(prefix, n)
            ],
        }

    @app.get("/doc/{doc_id}")
    def get_doc(doc_id: str):
        snapshot = _snapshot_or_503(app)
        if isinstance(snapshot, Response):
            return snapshot
        doc = snapshot.doc(doc_id)
        if doc is None:
            return JSONResponse(status_code=404, content={"error": f"unknown document {doc_id}"})
        return {
            "doc_id": doc.doc_id,
            "media_url": doc.media_url,
            "air_date": format_utc(doc.air_date),
            "source": doc.source,
            "language": doc.language,
            "segments": [_segment_json(seg) for seg in snapshot.doc_segments(doc_id)],
        }

    @app.get("/doc/{doc_id}/seg/{seg_index}")
    def get_segment(doc_id: str, seg_index: int):
        snapshot = _snapshot_or_503(app)
        if isinstance(snapshot, Response):
            return snapshot
        seg = snapshot.segment(doc_id, seg_index)
        if seg is None:
            return JSONResponse(
                status_code=404, content={"error": f"unknown segment {doc_id}/{seg_index}"}
            )
        payload = _segment_json(seg)
        payload["words"] = [
            {"surface": w.surface, "start_ms": w.start_ms} for w in seg.words
        ]
        return payload

    # -- admin ---------------------------------------------------------------

    @app.post("/admin/ingest", status_code=202)
    async def ingest(request: Request):
        if app.state.queue is None:
            return JSONResponse(status_code=503, content={"error": "no ingest queue"})
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
            codec.parse_transcript(text)  # validate before accepting
        except (UnicodeDecodeError, MalformedInput) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        except Exception as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        task_id = hashlib.sha1(raw).hexdigest()[:16]
        app.state.queue.enqueue(task_id, {"inline": text}, stage=STAGE_PROCESS)
        return {"task_id": task_id}

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.get("/admin/tasks")
    def tasks():
        if app.state.queue is None:
            return {"pending": 0, "leased": 0, "done": 0, "dead": 0, "dead_letters": []}
        counts = app.state.queue.status()
        return {
            **counts,
            "dead_letters": [
                {"task_id": t.task_id, "reason": t.dead_reason or ""}
                for t in app.state.queue.dead_letters()
            ],
        }

    return app


def _snapshot_or_503(app: FastAPI):
    index = app.state.index
    if index is None:
        return JSONResponse(status_code=503, content={"error": "index unavailable"})
    return index.snapshot()


def _build_ast(
    q: str,
    lang: str | None,
    from_: str | None,
    to: str | None,
    facet_params: list[str],
) -> Node:
    ast = parse_query(q, language=lang or "en")
    extras: list[Node] = []
    if lang:
        extras.append(LanguageFilter(code=lang))
    if from_ or to:
        start_raw = from_ or "1970-01-01"
        end_raw = to or "9999-12-30"
        if "T" not in start_raw:
            start_raw += "T00:00:00Z"
        if "T" not in end_raw:
            end_raw += "T23:59:59Z"
        try:
            extras.append(DateRange(start=parse_utc(start_raw), end=parse_utc(end_raw)))
        except ValueError:
            raise QuerySyntaxError("invalid from/to date", 0) from None
    for raw in facet_params:
        prefix, _, value = raw.partition(":")
        etype = FACET_PARAM_TYPES.get(prefix)
        if etype is None or not value:
            raise ValueError(f"bad facet parameter {raw!r}")
        extras.append(FacetFilter(type=etype, canonical=value))
    if extras:
        return And(children=(ast, *extras))
    return ast


def _hit_json(h: Hit) -> dict:
    return {
        "doc_id": h.doc_id,
        "seg_index": h.seg_index,
        "score": h.score,
        "air_date": format_utc(h.air_date),
        "media_url": h.media_url,
        "time_range": list(h.time_range),
        "matched_terms": [
            {
                "term": term,
                "positions": [
                    {"position": pos, "start_ms": ms} for pos, ms in positions
                ],
            }
            for term, positions in sorted(h.matched.items())
        ],
        "snippet": None
        if h.snippet is None
        else {
            "text": h.snippet.text,
            "words": list(h.snippet.words),
            "highlights": list(h.snippet.highlights),
            "window_start": h.snippet.window_start,
            "start_ms": h.snippet.start_ms,
        },
    }


def _segment_json(seg) -> dict:
    return {
        "doc_id": seg.doc_id,
        "seg_index": seg.seg_index,
        "air_date": format_utc(seg.air_date),
        "source": seg.source,
        "language": seg.language,
        "time_range": list(seg.time_range),
        "word_count": seg.word_count,
        "keywords": [{"lemma": lemma, "score": score} for lemma, score in seg.keywords],
        "entities": [
            {
                "canonical": m.canonical,
                "type": m.type.value,
                "surface": m.surface,
                "start_ms": m.start_ms,
                "lat": m.lat,
                "lon": m.lon,
            }
            for m in seg.entities
        ],
    }
