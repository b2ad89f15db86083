"""Command-line tools: segment, seg-eval, indexctl, pipectl, serve, report."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .api import ApiConfig, create_app
from .errors import SegsearchError
from .indexstore import Index, verify_index
from .metrics import pk_metric, windowdiff_metric
from .model import EntityType, parse_utc
from .pipeline import Pipeline, Worker
from .query_engine import execute
from .query_parser import parse_query
from .segmentation import CohesionParams, RelationTable
from .taskqueue import TaskQueue
from . import codec, feeds

INDEX_ENV = "SEGSEARCH_INDEX"
BIND_ENV = "SEGSEARCH_BIND"


def _load_params(alpha, conf_threshold, conf_mode, lambda_weight, min_units, max_units, keywords):
    return CohesionParams(
        alpha=alpha,
        conf_threshold=conf_threshold,
        conf_mode=conf_mode,
        lambda_weight=lambda_weight,
        min_units=min_units,
        max_units=max_units,
        top_k_keywords=keywords,
    )


@click.command("segment")
@click.argument("transcript", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--conf-threshold", type=float, default=0.0, show_default=True)
@click.option("--conf-mode", type=click.Choice(["identity", "thresholded"]), default="identity")
@click.option("--lambda", "lambda_weight", type=float, default=None,
              help="Semantic smoothing weight; defaults to 1 when --relations is given.")
@click.option("--relations", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--min-units", type=int, default=1, show_default=True)
@click.option("--max-units", type=int, default=None)
@click.option("--keywords", type=int, default=5, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write JSON here instead of stdout.")
def segment_cmd(transcript, alpha, conf_threshold, conf_mode, lambda_weight,
                relations, min_units, max_units, keywords, output):
    """Split one transcript into story segments."""
    params = _load_params(alpha, conf_threshold, conf_mode, lambda_weight,
                          min_units, max_units, keywords)
    relation_table = RelationTable.load(relations) if relations else None
    pipe = Pipeline(Index(), params=params, relations=relation_table)
    try:
        parsed = codec.parse_transcript(Path(transcript).read_bytes())
        doc = pipe.process_transcript(parsed)
    except SegsearchError as exc:
        raise click.ClickException(str(exc))

    from .segmentation import document_stats, segment_document
    from .lingproc import content_units, analyze

    tokens = analyze(parsed, pipe.resources_for(parsed.language))
    units = content_units(tokens, len(parsed.utterances))
    _, k, _ = document_stats(units, params)
    result = segment_document(units, k, params, relation_table)

    payload = {
        "doc_id": parsed.doc_id,
        "units": len(parsed.utterances),
        "cuts": list(result.cuts),
        "total_cost": result.total_cost,
        "per_segment_costs": list(result.per_segment_costs),
        "segments": [
            {
                "seg_index": s.seg_index,
                "unit_range": list(s.unit_range),
                "time_range": list(s.time_range),
                "keywords": [{"lemma": l, "score": v} for l, v in s.keywords],
            }
            for s in doc.segments
        ],
    }
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


@click.command("seg-eval")
@click.argument("reference", type=click.Path(exists=True, dir_okay=False))
@click.argument("hypothesis", type=click.Path(exists=True, dir_okay=False))
def seg_eval_cmd(reference, hypothesis):
    """Compare two segmentations (JSON cut files: {"units": T, "cuts": [...]}.)"""
    ref = json.loads(Path(reference).read_text(encoding="utf-8"))
    hyp = json.loads(Path(hypothesis).read_text(encoding="utf-8"))
    if ref.get("units") != hyp.get("units"):
        raise click.ClickException("reference and hypothesis cover different unit counts")
    total_units = ref["units"]
    try:
        pk = pk_metric(ref["cuts"], hyp["cuts"], total_units)
        wd = windowdiff_metric(ref["cuts"], hyp["cuts"], total_units)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"Pk\t{pk:.6f}")
    click.echo(f"WindowDiff\t{wd:.6f}")


def _open_index(index_path: str | None, must_exist: bool) -> tuple[Index, Path]:
    raw = index_path or os.environ.get(INDEX_ENV)
    if not raw:
        raise click.ClickException(f"no index path: pass --index or set {INDEX_ENV}")
    path = Path(raw)
    if (path / "manifest.json").is_file():
        return Index.load(path), path
    if must_exist:
        raise click.ClickException(f"no index at {path}")
    return Index(), path


@click.group("indexctl")
@click.option("--index", "index_path", type=click.Path(), default=None,
              help=f"Index directory (else ${INDEX_ENV}).")
@click.pass_context
def indexctl(ctx, index_path):
    """Inspect and maintain an on-disk index."""
    ctx.ensure_object(dict)
    ctx.obj["index_path"] = index_path


@indexctl.command("add")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--relations", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def indexctl_add(ctx, files, relations):
    """Process transcript FILES and add them to the index."""
    index, path = _open_index(ctx.obj["index_path"], must_exist=False)
    relation_table = RelationTable.load(relations) if relations else None
    pipe = Pipeline(index, relations=relation_table)
    for file in files:
        receipt = pipe.run_item(Path(file).read_bytes(), commit=False)
        click.echo(f"added {receipt.doc_id}: {receipt.segment_count} segments")
    index.commit()
    index.persist(path)
    click.echo(f"committed {len(files)} documents to {path}")


@indexctl.command("stats")
@click.pass_context
def indexctl_stats(ctx):
    index, _ = _open_index(ctx.obj["index_path"], must_exist=True)
    click.echo(json.dumps(index.snapshot().stats(), indent=2))


@indexctl.command("verify")
@click.pass_context
def indexctl_verify(ctx):
    raw = ctx.obj["index_path"] or os.environ.get(INDEX_ENV)
    if not raw:
        raise click.ClickException(f"no index path: pass --index or set {INDEX_ENV}")
    try:
        result = verify_index(raw)
    except SegsearchError as exc:
        raise click.ClickException(f"verification failed: {exc}")
    click.echo(json.dumps(result, indent=2))


@indexctl.command("compact")
@click.pass_context
def indexctl_compact(ctx):
    """Rewrite the on-disk layout from the live snapshot."""
    index, path = _open_index(ctx.obj["index_path"], must_exist=True)
    index.persist(path)
    click.echo(f"compacted {path}")


@click.group("pipectl")
@click.option("--queue-dir", type=click.Path(), default="queue",
              show_default=True, help="Directory holding journal and spool.")
@click.pass_context
def pipectl(ctx, queue_dir):
    """Operate the ingestion queue."""
    ctx.ensure_object(dict)
    ctx.obj["queue_dir"] = Path(queue_dir)


def _open_queue(queue_dir: Path) -> TaskQueue:
    queue_dir.mkdir(parents=True, exist_ok=True)
    return TaskQueue(queue_dir / "journal.jsonl")


@pipectl.command("status")
@click.pass_context
def pipectl_status(ctx):
    queue = _open_queue(ctx.obj["queue_dir"])
    click.echo(json.dumps(queue.status(), indent=2))


@pipectl.command("dead")
@click.pass_context
def pipectl_dead(ctx):
    queue = _open_queue(ctx.obj["queue_dir"])
    for task in queue.dead_letters():
        click.echo(f"{task.task_id}\t{task.stage}\t{task.dead_reason}")


@pipectl.command("retry")
@click.argument("task_id")
@click.pass_context
def pipectl_retry(ctx, task_id):
    queue = _open_queue(ctx.obj["queue_dir"])
    try:
        queue.retry(task_id)
    except SegsearchError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"requeued {task_id}")


@pipectl.command("add-feed")
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--feed-id", required=True)
@click.option("--url", required=True)
@click.option("--language", required=True)
@click.option("--poll-interval", type=int, default=900, show_default=True)
def pipectl_add_feed(config_path, feed_id, url, language, poll_interval):
    """Append a feed to a feed-config JSON file."""
    path = Path(config_path)
    entries = json.loads(path.read_text(encoding="utf-8")) if path.is_file() else []
    entries.append(
        {"feed_id": feed_id, "url": url, "language": language, "poll_interval": poll_interval}
    )
    feeds.FeedConfig(**entries[-1])  # validate before writing
    path.write_text(json.dumps(entries, indent=2), encoding="utf-8")
    click.echo(f"added feed {feed_id} to {path}")


@pipectl.command("poll")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--feed-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Read feed XML files from disk instead of the network.")
@click.pass_context
def pipectl_poll(ctx, config_path, feed_dir):
    queue = _open_queue(ctx.obj["queue_dir"])
    configs = feeds.load_feed_configs(config_path)
    enqueued = feeds.poll_all(configs, queue, feed_dir=feed_dir)
    click.echo(f"enqueued {enqueued} new items")


@pipectl.command("work")
@click.option("--index", "index_path", type=click.Path(), default=None)
@click.pass_context
def pipectl_work(ctx, index_path):
    """Drain the queue with one in-process worker."""
    queue_dir = ctx.obj["queue_dir"]
    queue = _open_queue(queue_dir)
    index, path = _open_index(index_path, must_exist=False)
    pipe = Pipeline(index, spool_dir=queue_dir / "spool")
    worker = Worker("pipectl", queue, pipe)
    steps = worker.run_until_idle()
    index.persist(path)
    click.echo(f"worked {steps} steps; queue now {json.dumps(queue.status())}")


@click.command("segsearch-serve")
@click.option("--index", "index_path", type=click.Path(), default=None)
@click.option("--bind", default=None, help=f"host:port (else ${BIND_ENV}, else 127.0.0.1:8080)")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--queue-dir", type=click.Path(), default="queue", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Serve a built browser UI from this directory under /ui.")
def serve_cmd(index_path, bind, config_path, queue_dir, ui_dir):
    """Serve the HTTP API (and process admin ingests)."""
    import uvicorn

    config = ApiConfig()
    if config_path:
        config = ApiConfig(**json.loads(Path(config_path).read_text(encoding="utf-8")))
    bind = bind or os.environ.get(BIND_ENV) or config.bind
    host, _, port = bind.partition(":")

    index, _ = _open_index(index_path or config.index_path, must_exist=False)
    queue_path = Path(queue_dir)
    queue_path.mkdir(parents=True, exist_ok=True)
    queue = TaskQueue(queue_path / "journal.jsonl")
    pipe = Pipeline(index, spool_dir=queue_path / "spool")
    app = create_app(
        index, queue=queue, pipeline=pipe, config=config, run_worker=True, ui_dir=ui_dir
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))


@click.group("segsearch-report")
@click.option("--index", "index_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="reports",
              show_default=True)
@click.pass_context
def report_cmd(ctx, index_path, out_dir):
    """Render TSV tables and PNG figures from an index."""
    ctx.ensure_object(dict)
    ctx.obj["index_path"] = index_path
    ctx.obj["out_dir"] = out_dir


@report_cmd.command("trends")
@click.option("--from", "from_", required=True, help="YYYY-MM-DD")
@click.option("--to", required=True, help="YYYY-MM-DD")
@click.option("--type", "facet_type", default="event", show_default=True,
              type=click.Choice(["person", "location", "organization", "event"]))
@click.option("--n", type=int, default=10, show_default=True)
@click.pass_context
def report_trends(ctx, from_, to, facet_type, n):
    from .report import trends_report

    index, _ = _open_index(ctx.obj["index_path"], must_exist=True)
    paths = trends_report(
        index.snapshot(),
        parse_utc(from_ + "T00:00:00Z"),
        parse_utc(to + "T23:59:59Z"),
        EntityType(facet_type),
        ctx.obj["out_dir"],
        top_n=n,
    )
    for label, path in paths.items():
        click.echo(f"{label}: {path}")


@report_cmd.command("query")
@click.argument("query_text")
@click.option("--lang", default=None)
@click.option("--limit", type=int, default=10, show_default=True)
@click.pass_context
def report_query(ctx, query_text, lang, limit):
    from .report import query_report

    index, _ = _open_index(ctx.obj["index_path"], must_exist=True)
    ast = parse_query(query_text, language=lang or "en")
    result = execute(index.snapshot(), ast, limit=limit)
    paths = query_report(result, query_text, ctx.obj["out_dir"])
    for label, path in paths.items():
        click.echo(f"{label}: {path}")


@report_cmd.command("segmentation")
@click.argument("transcript", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def report_segmentation(ctx, transcript):
    from .report import segmentation_report

    pipe = Pipeline(Index())
    parsed = codec.parse_transcript(Path(transcript).read_bytes())
    doc = pipe.process_transcript(parsed)
    paths = segmentation_report(doc, ctx.obj["out_dir"])
    for label, path in paths.items():
        click.echo(f"{label}: {path}")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(indexctl())
