"""RSS/Atom feed polling: new items become fetch tasks.

Items are identified by GUID; the queue's dedup makes repeated polls
idempotent. Each feed is configured with the language its transcripts
are in. Items must point at a transcript document (an XML/JSON enclosure
or a sidecar next to the media enclosure); media-only items are enqueued
anyway and dead-letter at the fetch stage with a clear reason.
"""

from __future__ import annotations

import hashlib
import json
import logging
import urllib.error
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from .errors import FeedUnreachable, MalformedFeed
from .model import SUPPORTED_LANGUAGES
from .taskqueue import TaskQueue

logger = logging.getLogger(__name__)

TRANSCRIPT_SUFFIXES = (".xml", ".json")


@dataclass(frozen=True)
class FeedConfig:
    feed_id: str
    url: str
    language: str
    poll_interval: int = 900

    def __post_init__(self):
        if self.language not in SUPPORTED_LANGUAGES:
            raise ValueError(f"unsupported feed language {self.language!r}")


@dataclass(frozen=True)
class FeedItem:
    guid: str
    title: str
    media_url: str
    transcript_url: str | None


def load_feed_configs(path: str | Path) -> list[FeedConfig]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return [FeedConfig(**entry) for entry in raw]


def task_id_for(feed_id: str, guid: str) -> str:
    """Deterministic task id from the feed item GUID."""
    return hashlib.sha1(f"{feed_id}\x00{guid}".encode("utf-8")).hexdigest()[:16]


def poll_feed(
    cfg: FeedConfig,
    queue: TaskQueue,
    feed_dir: str | Path | None = None,
) -> list[FeedItem]:
    """Fetch one feed and enqueue its unseen items; returns the new items.

    With ``feed_dir`` set, the feed XML is read from
    ``<feed_dir>/<feed_id>.xml`` instead of the network (fixture mode).
    """
    if feed_dir is not None:
        path = Path(feed_dir) / f"{cfg.feed_id}.xml"
        if not path.is_file():
            raise FeedUnreachable(str(path))
        data = path.read_bytes()
    else:
        try:
            with urllib.request.urlopen(cfg.url, timeout=30) as resp:
                data = resp.read()
        except (urllib.error.URLError, OSError) as exc:
            raise FeedUnreachable(f"{cfg.url}: {exc}") from None

    items = parse_feed(data)
    new_items = []
    for item in items:
        task_id = task_id_for(cfg.feed_id, item.guid)
        payload = {
            "feed_id": cfg.feed_id,
            "guid": item.guid,
            "language": cfg.language,
            "media_url": item.media_url,
            "transcript_url": item.transcript_url,
        }
        if queue.enqueue(task_id, payload):
            new_items.append(item)
    return new_items


def poll_all(
    configs: list[FeedConfig], queue: TaskQueue, feed_dir: str | Path | None = None
) -> int:
    """Poll every configured feed; unreachable or malformed feeds are logged
    and skipped, to be retried on the next cycle."""
    enqueued = 0
    for cfg in configs:
        try:
            enqueued += len(poll_feed(cfg, queue, feed_dir=feed_dir))
        except FeedUnreachable as exc:
            logger.warning("feed %s unreachable: %s", cfg.feed_id, exc)
        except MalformedFeed as exc:
            logger.warning("feed %s malformed: %s", cfg.feed_id, exc)
    return enqueued


def parse_feed(data: bytes) -> list[FeedItem]:
    """Parse RSS 2.0 or Atom into feed items."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedFeed(str(exc)) from None

    tag = root.tag.split("}")[-1]
    if tag == "rss":
        channel = root.find("channel")
        if channel is None:
            raise MalformedFeed("rss feed without channel")
        return [_rss_item(el) for el in channel.findall("item")]
    if tag == "feed":  # Atom
        return [_atom_entry(el) for el in root.findall("{http://www.w3.org/2005/Atom}entry")]
    raise MalformedFeed(f"unknown feed root <{tag}>")


def _rss_item(el: ET.Element) -> FeedItem:
    guid = _text(el, "guid") or _text(el, "link") or _text(el, "title") or ""
    if not guid:
        raise MalformedFeed("item without guid, link, or title")
    media_url = ""
    transcript_url = None
    for enc in el.findall("enclosure"):
        url = enc.get("url", "")
        etype = enc.get("type", "")
        if "xml" in etype or "json" in etype or url.endswith(TRANSCRIPT_SUFFIXES):
            transcript_url = url
        else:
            media_url = url
    tr = el.find("transcript")
    if tr is not None and tr.get("href"):
        transcript_url = tr.get("href")
    if transcript_url is None and media_url:
        # sidecar convention: transcript next to the media file
        stem, _, _ = media_url.rpartition(".")
        if stem:
            transcript_url = stem + ".xml"
    return FeedItem(
        guid=guid,
        title=_text(el, "title") or "",
        media_url=media_url,
        transcript_url=transcript_url,
    )


def _atom_entry(el: ET.Element) -> FeedItem:
    ns = "{http://www.w3.org/2005/Atom}"
    guid = _text(el, f"{ns}id") or ""
    if not guid:
        raise MalformedFeed("entry without id")
    media_url = ""
    transcript_url = None
    for link in el.findall(f"{ns}link"):
        href = link.get("href", "")
        if link.get("rel") == "enclosure":
            if href.endswith(TRANSCRIPT_SUFFIXES):
                transcript_url = href
            else:
                media_url = href
    return FeedItem(
        guid=guid,
        title=_text(el, f"{ns}title") or "",
        media_url=media_url,
        transcript_url=transcript_url,
    )


def _text(el: ET.Element, tag: str) -> str | None:
    child = el.find(tag)
    if child is not None and child.text:
        return child.text.strip()
    return None
