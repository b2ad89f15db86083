"""Exception types shared across the package."""


class SegsearchError(Exception):
    """Base class for all package errors."""


class MalformedInput(SegsearchError):
    """Transcript input violates the document schema.

    Carries the path of the offending element, e.g. ``document/utterance[2]/word[5]``.
    """

    def __init__(self, message: str, path: str = "document"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class UnsupportedLanguage(SegsearchError):
    pass


class LanguageMismatch(SegsearchError):
    pass


class InfeasibleConstraints(SegsearchError):
    """No segmentation satisfies the min/max unit-count constraints."""


class TooLarge(SegsearchError):
    """Input exceeds the exhaustive-enumeration bound."""


class DuplicateDocument(SegsearchError):
    pass


class StorageFull(SegsearchError):
    pass


class CorruptIndex(SegsearchError):
    """On-disk index failed checksum or structural validation."""


class VersionMismatch(SegsearchError):
    pass


class QuerySyntaxError(SegsearchError):
    """Query text could not be parsed; ``offset`` is the character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.reason = message


class TranslatorUnavailable(SegsearchError):
    pass


class UnsupportedPair(SegsearchError):
    pass


class StaleLease(SegsearchError):
    """Caller no longer holds the live lease on the task."""


class UnknownTask(SegsearchError):
    pass


class FeedUnreachable(SegsearchError):
    pass


class MalformedFeed(SegsearchError):
    pass
