"""Transcript interchange codec.

Two equivalent wire forms are accepted:

XML::

    <document id="cbs-001" lang="en" source="cbs" air_date="2010-08-15T18:00:00Z"
              media_url="http://example.org/a.mp4">
      <utterance speaker="spk1" gender="female">
        <word start="12340" dur="310" conf="0.92">Obama</word>
      </utterance>
    </document>

JSON mirror: the same field names, with ``utterances`` and ``words`` as
arrays and the word surface under ``"text"``.

``parse_transcript(serialize_transcript(t)) == t`` holds field-for-field,
including exact float confidences.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET

from .errors import MalformedInput, UnsupportedLanguage
from .model import (
    SUPPORTED_LANGUAGES,
    Gender,
    Transcript,
    TranscriptWord,
    Utterance,
    format_utc,
    parse_utc,
)

DEFAULT_SPEAKER = "spk-unknown"


def parse_transcript(data: bytes | str) -> Transcript:
    """Parse a transcript document from raw XML or JSON bytes.

    Words with no ``conf`` attribute default to 1.0; a missing speaker
    label defaults to ``spk-unknown``. An empty document body is valid and
    yields zero utterances. Raises :class:`MalformedInput` on schema
    violations (with the offending element path) and
    :class:`UnsupportedLanguage` for unknown language codes.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    return _parse_xml(text)


def serialize_transcript(t: Transcript, form: str = "xml") -> bytes:
    """Serialize a transcript to UTF-8 bytes in XML (default) or JSON form."""
    if form == "xml":
        return _to_xml(t)
    if form == "json":
        return _to_json(t)
    raise ValueError(f"unknown serialization form: {form!r}")


# -- XML ------------------------------------------------------------------

def _parse_xml(text: str) -> Transcript:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedInput(f"not well-formed XML: {exc}") from None
    if root.tag != "document":
        raise MalformedInput(f"root element must be <document>, got <{root.tag}>")

    doc_id = _require_attr(root, "id", "document")
    lang = _require_attr(root, "lang", "document")
    source = root.get("source", "")
    air_date_raw = _require_attr(root, "air_date", "document")
    media_url = root.get("media_url", "")

    utterances = []
    word_seen = 0
    prev_start = -1
    for u_num, u_el in enumerate(root, start=1):
        u_path = f"document/utterance[{u_num}]"
        if u_el.tag != "utterance":
            raise MalformedInput(f"unexpected element <{u_el.tag}>", u_path)
        speaker = u_el.get("speaker") or DEFAULT_SPEAKER
        gender = _parse_gender(u_el.get("gender"), u_path)
        words = []
        for w_num, w_el in enumerate(u_el, start=1):
            w_path = f"{u_path}/word[{w_num}]"
            if w_el.tag != "word":
                raise MalformedInput(f"unexpected element <{w_el.tag}>", w_path)
            word = _build_word(
                surface=(w_el.text or ""),
                start=w_el.get("start"),
                dur=w_el.get("dur"),
                conf=w_el.get("conf"),
                speaker=speaker,
                gender=gender,
                path=w_path,
            )
            if word.start_ms < prev_start:
                raise MalformedInput(
                    f"word start {word.start_ms} decreases below previous {prev_start}",
                    w_path,
                )
            prev_start = word.start_ms
            words.append(word)
            word_seen += 1
        if not words:
            raise MalformedInput("utterance has no words", u_path)
        utterances.append(
            Utterance(words=tuple(words), speaker_id=speaker, index=len(utterances))
        )

    return _build_transcript(doc_id, lang, source, air_date_raw, media_url, utterances)


def _to_xml(t: Transcript) -> bytes:
    root = ET.Element(
        "document",
        {
            "id": t.doc_id,
            "lang": t.language,
            "source": t.source,
            "air_date": format_utc(t.air_date),
            "media_url": t.media_url,
        },
    )
    for u in t.utterances:
        u_el = ET.SubElement(
            root, "utterance", {"speaker": u.speaker_id, "gender": u.words[0].gender.value}
        )
        for w in u.words:
            w_el = ET.SubElement(
                u_el,
                "word",
                {"start": str(w.start_ms), "dur": str(w.duration_ms), "conf": repr(w.confidence)},
            )
            w_el.text = w.surface
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


# -- JSON -----------------------------------------------------------------

def _parse_json(text: str) -> Transcript:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not well-formed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedInput("top-level JSON value must be an object")

    for key in ("id", "lang", "air_date"):
        if key not in obj:
            raise MalformedInput(f"missing required field {key!r}")

    utterances = []
    prev_start = -1
    for u_num, u_obj in enumerate(obj.get("utterances", []), start=1):
        u_path = f"document/utterance[{u_num}]"
        if not isinstance(u_obj, dict):
            raise MalformedInput("utterance must be an object", u_path)
        speaker = u_obj.get("speaker") or DEFAULT_SPEAKER
        gender = _parse_gender(u_obj.get("gender"), u_path)
        words = []
        for w_num, w_obj in enumerate(u_obj.get("words", []), start=1):
            w_path = f"{u_path}/word[{w_num}]"
            if not isinstance(w_obj, dict):
                raise MalformedInput("word must be an object", w_path)
            word = _build_word(
                surface=w_obj.get("text", ""),
                start=w_obj.get("start"),
                dur=w_obj.get("dur"),
                conf=w_obj.get("conf"),
                speaker=speaker,
                gender=gender,
                path=w_path,
            )
            if word.start_ms < prev_start:
                raise MalformedInput(
                    f"word start {word.start_ms} decreases below previous {prev_start}",
                    w_path,
                )
            prev_start = word.start_ms
            words.append(word)
        if not words:
            raise MalformedInput("utterance has no words", u_path)
        utterances.append(
            Utterance(words=tuple(words), speaker_id=speaker, index=len(utterances))
        )

    return _build_transcript(
        obj["id"], obj["lang"], obj.get("source", ""), obj["air_date"],
        obj.get("media_url", ""), utterances,
    )


def _to_json(t: Transcript) -> bytes:
    obj = {
        "id": t.doc_id,
        "lang": t.language,
        "source": t.source,
        "air_date": format_utc(t.air_date),
        "media_url": t.media_url,
        "utterances": [
            {
                "speaker": u.speaker_id,
                "gender": u.words[0].gender.value,
                "words": [
                    {"start": w.start_ms, "dur": w.duration_ms, "conf": w.confidence, "text": w.surface}
                    for w in u.words
                ],
            }
            for u in t.utterances
        ],
    }
    return json.dumps(obj, ensure_ascii=False).encode("utf-8")


# -- shared validation ----------------------------------------------------

def _require_attr(el: ET.Element, name: str, path: str) -> str:
    value = el.get(name)
    if value is None:
        raise MalformedInput(f"missing required attribute {name!r}", path)
    return value


def _parse_gender(raw, path: str) -> Gender:
    if raw is None or raw == "":
        return Gender.UNKNOWN
    try:
        return Gender(raw)
    except ValueError:
        raise MalformedInput(f"invalid gender {raw!r}", path) from None


def _build_word(surface, start, dur, conf, speaker, gender, path) -> TranscriptWord:
    surface = (surface or "").strip()
    if not surface:
        raise MalformedInput("word surface is empty", path)
    start_ms = _parse_nonneg_int(start, "start", path)
    duration_ms = _parse_nonneg_int(dur, "dur", path)
    if conf is None:
        confidence = 1.0
    else:
        try:
            confidence = float(conf)
        except (TypeError, ValueError):
            raise MalformedInput(f"invalid conf {conf!r}", path) from None
        if not 0.0 <= confidence <= 1.0:
            raise MalformedInput(f"conf {conf} outside [0,1]", path)
    return TranscriptWord(
        surface=surface,
        start_ms=start_ms,
        duration_ms=duration_ms,
        confidence=confidence,
        speaker_id=speaker,
        gender=gender,
    )


def _parse_nonneg_int(raw, name: str, path: str) -> int:
    if raw is None:
        raise MalformedInput(f"missing required attribute {name!r}", path)
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise MalformedInput(f"invalid {name} {raw!r}", path) from None
    if value < 0:
        raise MalformedInput(f"{name} must be >= 0, got {value}", path)
    return value


def _build_transcript(doc_id, lang, source, air_date_raw, media_url, utterances) -> Transcript:
    if not doc_id:
        raise MalformedInput("document id is empty")
    if lang not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguage(
            f"language {lang!r} not in supported set {SUPPORTED_LANGUAGES}"
        )
    try:
        air_date = parse_utc(air_date_raw)
    except ValueError:
        raise MalformedInput(f"invalid air_date {air_date_raw!r}") from None
    return Transcript(
        doc_id=doc_id,
        language=lang,
        source=source,
        air_date=air_date,
        media_url=media_url,
        utterances=tuple(utterances),
    )
