"""Query language: boolean/phrase search with facet and date filters.

Grammar, loosely::

    query   := group (OR group)*
    group   := atom+                      # implicit AND; "AND" accepted, redundant
    atom    := [-] ( '"' words '"'        # exact phrase, matches norms
                   | TYPE ':' value       # person|location|org|event|source|lang
                   | 'date:[' A TO B ']'  # inclusive day range
                   | word )               # single term, lemmatized

Terms are lemmatized with the query language's resources; phrases are
casefolded but not lemmatized. ``-`` negates the following atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, time, timezone

from .errors import QuerySyntaxError
from .lingproc import LanguageResources, lemma_of, normalize
from .model import EntityType, parse_utc


@dataclass(frozen=True)
class Term:
    lemma: str


@dataclass(frozen=True)
class Phrase:
    norms: tuple[str, ...]


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class FacetFilter:
    type: EntityType
    canonical: str


@dataclass(frozen=True)
class DateRange:
    start: datetime
    end: datetime


@dataclass(frozen=True)
class SourceFilter:
    feed: str


@dataclass(frozen=True)
class LanguageFilter:
    code: str


Node = Term | Phrase | Not | And | Or | FacetFilter | DateRange | SourceFilter | LanguageFilter

FACET_TYPES = {
    "person": EntityType.PERSON,
    "location": EntityType.LOCATION,
    "org": EntityType.ORGANIZATION,
    "organization": EntityType.ORGANIZATION,
    "event": EntityType.EVENT,
}
FILTER_PREFIXES = set(FACET_TYPES) | {"source", "lang", "date"}


def parse_query(
    text: str,
    language: str = "en",
    resources: LanguageResources | None = None,
) -> Node:
    """Parse query text into an AST; raises :class:`QuerySyntaxError` with a
    character offset on unbalanced quotes/brackets or empty input."""
    if resources is None:
        resources = LanguageResources.bundled(language)
    atoms = _scan(text)
    if not atoms:
        raise QuerySyntaxError("empty query", 0)

    groups: list[list[tuple]] = [[]]
    for atom in atoms:
        if atom[0] == "or":
            if not groups[-1]:
                raise QuerySyntaxError("OR with empty left side", atom[1])
            groups.append([])
        else:
            groups.append(groups.pop() + [atom])
    if not groups[-1]:
        raise QuerySyntaxError("OR with empty right side", atoms[-1][1])

    branches = [_build_group(group, resources) for group in groups]
    if len(branches) == 1:
        return branches[0]
    return Or(children=tuple(branches))


def _build_group(atoms: list[tuple], resources: LanguageResources) -> Node:
    children: list[Node] = []
    for atom in atoms:
        kind, offset, negated, payload = atom
        if kind == "phrase":
            norms = tuple(normalize(w) for w in payload.split())
            if not norms:
                raise QuerySyntaxError("empty phrase", offset)
            node: Node = Phrase(norms=norms)
        elif kind == "filter":
            node = _build_filter(payload, offset)
        else:
            node = Term(lemma=lemma_of(normalize(payload), resources))
        children.append(Not(child=node) if negated else node)

    if len(children) == 1 and not isinstance(children[0], Not):
        return children[0]
    return And(children=tuple(children))


def _build_filter(payload: tuple[str, str], offset: int) -> Node:
    prefix, value = payload
    if prefix == "date":
        parts = value.split(" TO ")
        if len(parts) != 2:
            raise QuerySyntaxError("date range must be [A TO B]", offset)
        try:
            start = _day_start(parts[0].strip())
            end = _day_end(parts[1].strip())
        except ValueError:
            raise QuerySyntaxError(f"invalid date in range {value!r}", offset) from None
        return DateRange(start=start, end=end)
    if prefix == "source":
        return SourceFilter(feed=value)
    if prefix == "lang":
        return LanguageFilter(code=value)
    return FacetFilter(type=FACET_TYPES[prefix], canonical=value)


def _day_start(raw: str) -> datetime:
    if len(raw) == 10:  # bare YYYY-MM-DD
        return datetime.combine(
            datetime.strptime(raw, "%Y-%m-%d").date(), time.min, tzinfo=timezone.utc
        )
    return parse_utc(raw)


def _day_end(raw: str) -> datetime:
    if len(raw) == 10:
        return datetime.combine(
            datetime.strptime(raw, "%Y-%m-%d").date(), time.max, tzinfo=timezone.utc
        )
    return parse_utc(raw)


def _scan(text: str) -> list[tuple]:
    """Tokenize into (kind, offset, negated, payload) atoms.

    Kinds: ``term`` (payload str), ``phrase`` (payload str), ``filter``
    (payload (prefix, value)), ``or`` (operator marker).
    """
    atoms: list[tuple] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        negated = False
        if text[i] == "-" and i + 1 < n and not text[i + 1].isspace():
            negated = True
            i += 1
        if i < n and text[i] == '"':
            phrase, i = _read_quoted(text, i)
            atoms.append(("phrase", start, negated, phrase))
            continue
        # bare token, possibly prefix:value / prefix:"value" / date:[...]
        j = i
        while j < n and not text[j].isspace() and text[j] not in '"[':
            j += 1
        token = text[i:j]
        colon = token.find(":")
        prefix = token[:colon].casefold() if colon > 0 else None
        if prefix == "date" and j < n and text[j] == "[":
            close = text.find("]", j)
            if close < 0:
                raise QuerySyntaxError("unbalanced '['", j)
            value = text[j + 1 : close]
            atoms.append(("filter", start, negated, ("date", value)))
            i = close + 1
            continue
        if prefix in FILTER_PREFIXES and prefix != "date":
            rest = token[colon + 1 :]
            if rest == "" and j < n and text[j] == '"':
                rest, j = _read_quoted(text, j)
            if not rest:
                raise QuerySyntaxError(f"empty value for {prefix}:", start)
            atoms.append(("filter", start, negated, (prefix, rest)))
            i = j
            continue
        if j == i:  # lone '"' or '[' handled above; '[' without date: prefix
            if text[j] == "[":
                raise QuerySyntaxError("unexpected '['", j)
            phrase, i = _read_quoted(text, j)
            atoms.append(("phrase", start, negated, phrase))
            continue
        if token == "OR" and not negated:
            atoms.append(("or", start, False, None))
        elif token == "AND" and not negated:
            pass  # implicit-AND keyword, accepted and redundant
        else:
            atoms.append(("term", start, negated, token))
        i = j
    return atoms


def _read_quoted(text: str, open_pos: int) -> tuple[str, int]:
    close = text.find('"', open_pos + 1)
    if close < 0:
        raise QuerySyntaxError("unbalanced '\"'", open_pos)
    return text[open_pos + 1 : close], close + 1


def positive_leaves(node: Node) -> list[Node]:
    """Term/Phrase/FacetFilter leaves not under a negation, in tree order."""
    found: list[Node] = []

    def walk(n: Node, negated: bool):
        if isinstance(n, Not):
            walk(n.child, True)
        elif isinstance(n, (And, Or)):
            for child in n.children:
                walk(child, negated)
        elif isinstance(n, (Term, Phrase, FacetFilter)) and not negated:
            found.append(n)

    walk(node, False)
    return found
