import pytest

from segsearch.errors import FeedUnreachable, MalformedFeed
from segsearch.feeds import FeedConfig, parse_feed, poll_all, poll_feed, task_id_for
from segsearch.taskqueue import TaskQueue

RSS = """<?xml version="1.0"?>
<rss version="2.0"><channel>
  <title>Example News</title>
  <item>
    <title>Morning bulletin</title>
    <guid>item-001</guid>
    <enclosure url="http://cdn.example/m1.mp3" type="audio/mpeg"/>
    <enclosure url="http://cdn.example/m1.xml" type="application/xml"/>
  </item>
  <item>
    <title>Evening bulletin</title>
    <guid>item-002</guid>
    <enclosure url="http://cdn.example/m2.mp3" type="audio/mpeg"/>
  </item>
  <item>
    <title>Special report</title>
    <guid>item-003</guid>
    <transcript href="http://cdn.example/special.json"/>
  </item>
</channel></rss>
"""

ATOM = """<?xml version="1.0"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <entry>
    <id>atom-1</id>
    <title>Entry one</title>
    <link rel="enclosure" href="http://cdn.example/a1.xml"/>
  </entry>
</feed>
"""


def test_parse_rss_items():
    items = parse_feed(RSS.encode())
    assert [i.guid for i in items] == ["item-001", "item-002", "item-003"]
    assert items[0].transcript_url == "http://cdn.example/m1.xml"
    # sidecar convention for media-only items
    assert items[1].transcript_url == "http://cdn.example/m2.xml"
    assert items[2].transcript_url == "http://cdn.example/special.json"


def test_parse_atom():
    items = parse_feed(ATOM.encode())
    assert items[0].guid == "atom-1"
    assert items[0].transcript_url == "http://cdn.example/a1.xml"


def test_malformed_feed():
    with pytest.raises(MalformedFeed):
        parse_feed(b"<rss><channel><item>")
    with pytest.raises(MalformedFeed):
        parse_feed(b"<html></html>")


def test_poll_skips_seen_guids(tmp_path):
    (tmp_path / "news.xml").write_text(RSS, encoding="utf-8")
    queue = TaskQueue(tmp_path / "journal.jsonl")
    cfg = FeedConfig(feed_id="news", url="http://unused", language="en")
    # pre-seed one item as already seen
    queue.enqueue(task_id_for("news", "item-001"), {})
    new = poll_feed(cfg, queue, feed_dir=tmp_path)
    assert [i.guid for i in new] == ["item-002", "item-003"]
    assert poll_feed(cfg, queue, feed_dir=tmp_path) == []


def test_poll_unreachable_fixture(tmp_path):
    queue = TaskQueue(tmp_path / "journal.jsonl")
    cfg = FeedConfig(feed_id="missing", url="http://unused", language="en")
    with pytest.raises(FeedUnreachable):
        poll_feed(cfg, queue, feed_dir=tmp_path)


def test_poll_all_logs_and_continues(tmp_path, caplog):
    (tmp_path / "good.xml").write_text(RSS, encoding="utf-8")
    (tmp_path / "bad.xml").write_text("<rss><channel><item>", encoding="utf-8")
    queue = TaskQueue(tmp_path / "journal.jsonl")
    configs = [
        FeedConfig(feed_id="bad", url="x", language="en"),
        FeedConfig(feed_id="missing", url="x", language="en"),
        FeedConfig(feed_id="good", url="x", language="en"),
    ]
    assert poll_all(configs, queue, feed_dir=tmp_path) == 3


def test_feed_config_validates_language():
    with pytest.raises(ValueError):
        FeedConfig(feed_id="x", url="u", language="xx")


def test_task_ids_deterministic():
    assert task_id_for("f", "g") == task_id_for("f", "g")
    assert task_id_for("f", "g") != task_id_for("f", "h")
