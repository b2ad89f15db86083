"""Segment-scoped search over news-broadcast speech transcripts."""

__version__ = "0.1.0"
