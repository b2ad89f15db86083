"""Cross-lingual query support via a pluggable translator interface.

The query string (not the index) is translated, then parsed with the
target language's resources and run against that language's documents.
The bundled implementation is a word-by-word dictionary lookup so the
feature is testable offline; real deployments plug an external service
behind the same interface.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path

from .errors import TranslatorUnavailable, UnsupportedPair


class DictionaryTranslator:
    """Token dictionary translator backed by ``dict.<src>-<tgt>.tsv`` files."""

    def __init__(self, directory: str | Path | None = None):
        if directory is None:
            directory = Path(str(importlib.resources.files("segsearch") / "resources" / "dicts"))
        self.directory = Path(directory)
        self._tables: dict[tuple[str, str], dict[str, str]] = {}
        if self.directory.is_dir():
            for path in sorted(self.directory.glob("dict.*.tsv")):
                pair = path.name[len("dict.") : -len(".tsv")]
                src, _, tgt = pair.partition("-")
                if not src or not tgt:
                    continue
                table = {}
                for raw in path.read_text(encoding="utf-8").splitlines():
                    line = raw.strip()
                    if not line or line.startswith("#"):
                        continue
                    parts = line.split("\t")
                    if len(parts) >= 2:
                        table[parts[0].casefold()] = parts[1]
                self._tables[(src, tgt)] = table

    def supported_pairs(self) -> set[tuple[str, str]]:
        return set(self._tables.keys())

    def translate(self, text: str, source: str, target: str) -> str:
        if source == target:
            return text
        table = self._tables.get((source, target))
        if table is None:
            raise UnsupportedPair(f"{source}->{target}")
        out = []
        for token in text.split(" "):
            out.append(table.get(token.casefold(), token))
        return " ".join(out)


def translate_query(text: str, source: str, target: str, translator) -> str:
    """Translate a raw query string, leaving operators and filters intact.

    Identity pairs pass through unchanged. Raises
    :class:`TranslatorUnavailable` when no translator is configured and
    :class:`UnsupportedPair` when the pair is not covered.
    """
    if source == target:
        return text
    if translator is None:
        raise TranslatorUnavailable("no translator configured")
    if (source, target) not in translator.supported_pairs():
        raise UnsupportedPair(f"{source}->{target}")

    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            out.append(ch)
            i += 1
            continue
        if ch == '"':
            close = text.find('"', i + 1)
            if close < 0:
                close = n - 1
            inner = text[i + 1 : close]
            out.append('"' + translator.translate(inner, source, target) + '"')
            i = close + 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        token = text[i:j]
        if token.startswith("date:") and "[" in token:
            close = text.find("]", i)
            if close < 0:
                close = n - 1
            out.append(text[i : close + 1])
            i = close + 1
            continue
        if token in ("OR", "AND") or ":" in token:
            out.append(token)
        elif token.startswith("-"):
            out.append("-" + translator.translate(token[1:], source, target))
        else:
            out.append(translator.translate(token, source, target))
        i = j
    return "".join(out)
