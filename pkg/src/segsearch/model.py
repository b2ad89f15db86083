"""Shared domain types: transcripts, utterances, words, and story segments.

All types are immutable after construction and safe to share between
threads without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

SUPPORTED_LANGUAGES = ("en", "fr", "es", "zh", "nl", "ru", "ar")


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"


class EntityType(str, Enum):
    PERSON = "person"
    LOCATION = "location"
    ORGANIZATION = "organization"
    EVENT = "event"


@dataclass(frozen=True)
class TranscriptWord:
    """One recognized word with its media time code and recognition confidence."""

    surface: str
    start_ms: int
    duration_ms: int
    confidence: float
    speaker_id: str
    gender: Gender = Gender.UNKNOWN

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.duration_ms


@dataclass(frozen=True)
class Utterance:
    """A same-speaker run of words; the atomic unit between which segment
    boundaries may be placed."""

    words: tuple[TranscriptWord, ...]
    speaker_id: str
    index: int

    @property
    def start_ms(self) -> int:
        return self.words[0].start_ms

    @property
    def end_ms(self) -> int:
        return self.words[-1].end_ms


@dataclass(frozen=True)
class Transcript:
    """One broadcast's ordered, timed, confidence-scored words."""

    doc_id: str
    language: str
    source: str
    air_date: datetime
    media_url: str
    utterances: tuple[Utterance, ...]

    def words(self) -> list[TranscriptWord]:
        """Flattened word sequence across all utterances."""
        return [w for u in self.utterances for w in u.words]

    def word_count(self) -> int:
        return sum(len(u.words) for u in self.utterances)


@dataclass(frozen=True)
class SegmentEntity:
    """Entity occurrence attached to a segment, with coordinates when known."""

    surface: str
    type: EntityType
    lat: float | None = None
    lon: float | None = None


@dataclass(frozen=True)
class Segment:
    """A contiguous utterance range forming one news story; the unit of
    indexing and retrieval.

    ``unit_range`` is inclusive on both ends. ``time_range`` spans from the
    start of the first word to the end (start + duration) of the last word
    in the range.
    """

    doc_id: str
    seg_index: int
    unit_range: tuple[int, int]
    time_range: tuple[int, int]
    keywords: tuple[tuple[str, float], ...] = ()
    entities: tuple[SegmentEntity, ...] = ()


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def parse_utc(text: str) -> datetime:
    """Parse an ISO-8601 timestamp, accepting a trailing ``Z``."""
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_utc(dt: datetime) -> str:
    """Render a UTC timestamp as ISO-8601 with a ``Z`` suffix."""
    dt = dt.astimezone(timezone.utc)
    return dt.replace(tzinfo=None).isoformat() + "Z"


def segments_from_cuts(
    transcript: Transcript, cuts: list[int]
) -> list[tuple[int, int]]:
    """Turn boundary indices [0, b1, .., T] into inclusive utterance ranges."""
    return [(cuts[i] , cuts[i + 1] - 1) for i in range(len(cuts) - 1)]


def segment_time_range(transcript: Transcript, first_unit: int, last_unit: int) -> tuple[int, int]:
    first_word = transcript.utterances[first_unit].words[0]
    last_word = transcript.utterances[last_unit].words[-1]
    return (first_word.start_ms, last_word.start_ms + last_word.duration_ms)
