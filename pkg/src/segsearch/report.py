"""Report rendering: delimited tables plus matplotlib figures on disk.

Each report writes a TSV with the underlying numbers next to a PNG
rendering of the same data, so results can be eyeballed or diffed.
"""

from __future__ import annotations

import csv
from datetime import datetime
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .indexstore import IndexSnapshot
from .model import EntityType, Transcript
from .pipeline import ProcessedDoc
from .query_engine import QueryResult, compute_trends


def _write_tsv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(header)
        writer.writerows(rows)


def trends_report(
    snapshot: IndexSnapshot,
    start: datetime,
    end: datetime,
    facet_type: EntityType,
    out_dir: str | Path,
    top_n: int = 10,
) -> dict[str, Path]:
    """Top entities of one type over a period: trends.tsv + trends.png."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = compute_trends(snapshot, start, end, facet_type, top_n=top_n)

    tsv_path = out_dir / "trends.tsv"
    _write_tsv(tsv_path, ["canonical", "mentions"], [[v, c] for v, c in rows])

    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.5 * len(rows) + 1)))
    if rows:
        labels = [v for v, _ in rows][::-1]
        counts = [c for _, c in rows][::-1]
        ax.barh(labels, counts, color="#4878a8")
        ax.set_xlabel("mentions")
    else:
        ax.text(0.5, 0.5, "no mentions in period", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title(
        f"{facet_type.value} trends {start.date().isoformat()} .. {end.date().isoformat()}"
    )
    fig.tight_layout()
    png_path = out_dir / "trends.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"tsv": tsv_path, "png": png_path}


def query_report(
    result: QueryResult, query_text: str, out_dir: str | Path
) -> dict[str, Path]:
    """Hits, facet counts, and the daily histogram of one query."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    hits_path = out_dir / "hits.tsv"
    _write_tsv(
        hits_path,
        ["doc_id", "seg_index", "score", "air_date", "snippet"],
        [
            [
                h.doc_id,
                h.seg_index,
                f"{h.score:.6g}",
                h.air_date.date().isoformat(),
                h.snippet.text if h.snippet else "",
            ]
            for h in result.hits
        ],
    )

    hist_path = out_dir / "histogram.tsv"
    _write_tsv(hist_path, ["day", "hits"], [[d, c] for d, c in result.histogram])

    facets_path = out_dir / "facets.tsv"
    _write_tsv(
        facets_path,
        ["type", "canonical", "segments"],
        [
            [ftype, value, count]
            for ftype, rows in result.facets.items()
            for value, count in rows
        ],
    )

    fig, ax = plt.subplots(figsize=(9, 3))
    if result.histogram:
        days = [d for d, _ in result.histogram]
        counts = [c for _, c in result.histogram]
        ax.bar(days, counts, color="#4878a8")
        ax.set_ylabel("hits per day")
        if len(days) > 8:
            ax.tick_params(axis="x", rotation=60, labelsize=7)
    else:
        ax.text(0.5, 0.5, "no hits", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title(f"timeline: {query_text!r} ({result.total} hits)")
    fig.tight_layout()
    png_path = out_dir / "histogram.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"hits": hits_path, "histogram": hist_path, "facets": facets_path, "png": png_path}


def segmentation_report(
    doc: ProcessedDoc, out_dir: str | Path
) -> dict[str, Path]:
    """Segment spans on the media timeline, labelled with their keywords."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for seg in doc.segments:
        rows.append(
            [
                seg.seg_index,
                seg.unit_range[0],
                seg.unit_range[1],
                seg.time_range[0],
                seg.time_range[1],
                ", ".join(lemma for lemma, _ in seg.keywords),
            ]
        )
    tsv_path = out_dir / "segments.tsv"
    _write_tsv(
        tsv_path,
        ["seg_index", "first_unit", "last_unit", "start_ms", "end_ms", "keywords"],
        rows,
    )

    fig, ax = plt.subplots(figsize=(10, 2.8))
    palette = ["#4878a8", "#e49444", "#5aa25a", "#c65c5c", "#8a70b8", "#bfa43e"]
    for seg in doc.segments:
        start_s = seg.time_range[0] / 1000.0
        width_s = (seg.time_range[1] - seg.time_range[0]) / 1000.0
        ax.broken_barh(
            [(start_s, width_s)], (0.2, 0.6),
            facecolors=palette[seg.seg_index % len(palette)], edgecolor="white",
        )
        label = ", ".join(lemma for lemma, _ in seg.keywords[:3])
        ax.text(
            start_s + width_s / 2, 0.92, label or f"seg {seg.seg_index}",
            ha="center", va="bottom", fontsize=8, rotation=15,
        )
    ax.set_ylim(0, 1.6)
    ax.set_yticks([])
    ax.set_xlabel("media time (s)")
    ax.set_title(f"{doc.transcript.doc_id}: {len(doc.segments)} story segments")
    fig.tight_layout()
    png_path = out_dir / "segmentation.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"tsv": tsv_path, "png": png_path}
