"""Token normalization, lemma/POS assignment, and content-word selection.

Tagging is deliberately deterministic: a bundled lexicon plus ordered
suffix rules per language. Thematic cohesion downstream only consumes
nouns, adjectives, and non-modal verbs that survive the stopword filter,
so tagger coverage beyond those classes is unnecessary.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LanguageMismatch
from .model import Transcript


class Pos:
    NOUN = "noun"
    ADJECTIVE = "adjective"
    VERB = "verb"
    MODAL_VERB = "modal_verb"
    OTHER = "other"


CONTENT_POS = {Pos.NOUN, Pos.ADJECTIVE, Pos.VERB}


@dataclass(frozen=True)
class AnalyzedToken:
    word_ref: int
    utterance_index: int
    norm: str
    lemma: str
    pos: str
    is_content: bool
    confidence: float


@dataclass(frozen=True)
class ContentWord:
    """One content token, the unit the cohesion cost is computed over."""

    lemma: str
    confidence: float
    utterance_index: int
    word_ref: int


@dataclass
class SuffixRule:
    pattern: str       # suffix to match on the norm
    replacement: str   # what replaces the suffix to form the lemma
    pos: str


@dataclass
class LanguageResources:
    """Per-language stopwords, lemma lexicon, modal list, and suffix rules.

    Read-only after load; shareable between threads.
    """

    language: str
    stopwords: frozenset[str] = frozenset()
    lexicon: dict[str, tuple[str, str]] = field(default_factory=dict)
    modal_verbs: frozenset[str] = frozenset()
    suffix_rules: list[SuffixRule] = field(default_factory=list)

    @classmethod
    def load(cls, directory: str | Path, language: str | None = None) -> "LanguageResources":
        """Load resources from a directory of plain-text files.

        Expected files (each optional): ``stopwords.txt``, ``lexicon.tsv``
        (norm TAB lemma TAB pos), ``modals.txt``, ``suffix_rules.tsv``
        (pattern TAB replacement TAB pos).
        """
        directory = Path(directory)
        language = language or directory.name
        stopwords = _read_lines(directory / "stopwords.txt")
        modals = _read_lines(directory / "modals.txt")
        lexicon: dict[str, tuple[str, str]] = {}
        for line in _read_lines(directory / "lexicon.tsv", keep_order=True):
            parts = line.split("\t")
            if len(parts) == 3:
                lexicon[parts[0]] = (parts[1], parts[2])
        rules = []
        for line in _read_lines(directory / "suffix_rules.tsv", keep_order=True):
            parts = line.split("\t")
            if len(parts) == 3:
                rules.append(SuffixRule(parts[0], parts[1], parts[2]))
        return cls(
            language=language,
            stopwords=frozenset(stopwords),
            lexicon=lexicon,
            modal_verbs=frozenset(modals),
            suffix_rules=rules,
        )

    @classmethod
    def bundled(cls, language: str) -> "LanguageResources":
        """Load the resources shipped with the package for ``language``.

        Languages without bundled files get empty resources: every token
        then tags as ``other`` and no token counts as content.
        """
        root = importlib.resources.files("segsearch") / "resources" / language
        try:
            path = Path(str(root))
        except TypeError:  # pragma: no cover
            return cls(language=language)
        if not path.is_dir():
            return cls(language=language)
        return cls.load(path, language)


def _read_lines(path: Path, keep_order: bool = False) -> list[str]:
    if not path.is_file():
        return []
    lines = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def normalize(surface: str) -> str:
    """Casefold a surface form; punctuation is kept as the recognizer wrote it."""
    return surface.casefold()


def analyze(t: Transcript, r: LanguageResources) -> list[AnalyzedToken]:
    """Tag and lemmatize every transcript word, in order.

    Lemma and POS come from the lexicon when present, else the first
    matching suffix rule, else the norm itself with POS ``other``. Lexicon
    entries tagged as verbs whose lemma is in the modal list are retagged
    ``modal_verb``. Raises :class:`LanguageMismatch` if the resources are
    for a different language.
    """
    if r.language != t.language:
        raise LanguageMismatch(
            f"resources are for {r.language!r}, transcript is {t.language!r}"
        )
    tokens: list[AnalyzedToken] = []
    word_ref = 0
    for utt in t.utterances:
        for word in utt.words:
            norm = normalize(word.surface)
            lemma, pos = _tag(norm, r)
            if pos == Pos.VERB and lemma in r.modal_verbs:
                pos = Pos.MODAL_VERB
            is_content = pos in CONTENT_POS and norm not in r.stopwords
            tokens.append(
                AnalyzedToken(
                    word_ref=word_ref,
                    utterance_index=utt.index,
                    norm=norm,
                    lemma=lemma,
                    pos=pos,
                    is_content=is_content,
                    confidence=word.confidence,
                )
            )
            word_ref += 1
    return tokens


def lemma_of(norm: str, r: LanguageResources) -> str:
    """Lemma a query term would get: lexicon, then suffix rules, then itself."""
    return _tag(norm, r)[0]


def _tag(norm: str, r: LanguageResources) -> tuple[str, str]:
    hit = r.lexicon.get(norm)
    if hit is not None:
        return hit
    for rule in r.suffix_rules:
        if norm.endswith(rule.pattern) and len(norm) > len(rule.pattern):
            return norm[: -len(rule.pattern)] + rule.replacement, rule.pos
    return norm, Pos.OTHER


def content_sequence(tokens: list[AnalyzedToken]) -> list[ContentWord]:
    """Filter analyzed tokens down to content words, order preserved."""
    return [
        ContentWord(
            lemma=tok.lemma,
            confidence=tok.confidence,
            utterance_index=tok.utterance_index,
            word_ref=tok.word_ref,
        )
        for tok in tokens
        if tok.is_content
    ]


def content_units(tokens: list[AnalyzedToken], unit_count: int) -> list[list[ContentWord]]:
    """Group the content sequence by utterance, including empty units."""
    units: list[list[ContentWord]] = [[] for _ in range(unit_count)]
    for cw in content_sequence(tokens):
        units[cw.utterance_index].append(cw)
    return units
