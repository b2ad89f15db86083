"""Topic segmentation by lexical cohesion.

A segment's cost is the negative log-likelihood of its content words under
a Laplace-smoothed unigram model estimated from the segment itself:

    L(S) = sum_j -phi(c_j) * ln( (f'(w_j) + 1) / (n + k) )

where phi is the confidence weight (identity, or zeroed below a
threshold), n is the confidence-weighted segment length, f(w) the
confidence-weighted count of lemma w inside the segment, and
f'(w) = f(w) + lambda * sum over related lemmas r of sim(w,r) * f(r).
Repetition makes the segment-internal model sharp, so topically
homogeneous spans score low; k is the document's distinct content-lemma
count (the smoothing vocabulary).

A document's segmentation cost is the sum of its segment costs plus a
per-segment prior alpha * ln(N) penalizing fragmentation, minimized
exactly by dynamic programming over utterance boundaries.

Words with zero effective confidence are skipped everywhere, which makes
them bit-for-bit equivalent to words that are not present at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import InfeasibleConstraints, TooLarge
from .lingproc import ContentWord

BRUTE_FORCE_MAX_UNITS = 20

CONF_IDENTITY = "identity"
CONF_THRESHOLDED = "thresholded"


@dataclass(frozen=True)
class CohesionParams:
    """Knobs of the cohesion cost.

    ``lambda_weight=None`` resolves to 1.0 when a non-empty relation table
    is supplied and 0.0 otherwise.
    """

    alpha: float = 1.0
    conf_threshold: float = 0.0
    conf_mode: str = CONF_IDENTITY
    lambda_weight: float | None = None
    min_units: int = 1
    max_units: int | None = None
    top_k_keywords: int = 5

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if not 0.0 <= self.conf_threshold <= 1.0:
            raise ValueError("conf_threshold must be in [0,1]")
        if self.conf_mode not in (CONF_IDENTITY, CONF_THRESHOLDED):
            raise ValueError(f"unknown conf_mode {self.conf_mode!r}")
        if self.lambda_weight is not None and self.lambda_weight < 0:
            raise ValueError("lambda_weight must be >= 0")
        if self.min_units < 1:
            raise ValueError("min_units must be >= 1")
        if self.max_units is not None and self.max_units < self.min_units:
            raise ValueError("min_units must be <= max_units")

    def phi(self, confidence: float) -> float:
        """Effective weight of a word with the given recognition confidence."""
        if self.conf_mode == CONF_THRESHOLDED and confidence < self.conf_threshold:
            return 0.0
        return confidence

    def effective_lambda(self, relations: "RelationTable | None") -> float:
        if self.lambda_weight is not None:
            return self.lambda_weight
        if relations is not None and len(relations) > 0:
            return 1.0
        return 0.0


class RelationTable:
    """Weighted lemma-to-lemma similarities crediting near-repetitions."""

    def __init__(self, relations: dict[str, list[tuple[str, float]]] | None = None):
        self._forward: dict[str, list[tuple[str, float]]] = {}
        self._reverse: dict[str, list[tuple[str, float]]] = {}
        if relations:
            for lemma, related in relations.items():
                for other, sim in related:
                    self.add(lemma, other, sim)

    def add(self, lemma: str, related: str, sim: float) -> None:
        if lemma == related:
            raise ValueError(f"self-relation on {lemma!r}")
        if not 0.0 < sim <= 1.0:
            raise ValueError(f"similarity {sim} outside (0,1]")
        self._forward.setdefault(lemma, []).append((related, sim))
        self._reverse.setdefault(related, []).append((lemma, sim))

    def related(self, lemma: str) -> list[tuple[str, float]]:
        return self._forward.get(lemma, [])

    def reverse(self, lemma: str) -> list[tuple[str, float]]:
        """Pairs (x, sim) such that ``lemma`` appears in x's relation list."""
        return self._reverse.get(lemma, [])

    def __len__(self) -> int:
        return sum(len(v) for v in self._forward.values())

    @classmethod
    def load(cls, path: str | Path) -> "RelationTable":
        """Read a TSV of ``lemma TAB related_lemma TAB sim`` lines."""
        table = cls()
        for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected 3 tab-separated fields")
            table.add(parts[0], parts[1], float(parts[2]))
        return table


@dataclass(frozen=True)
class SegmentationResult:
    """Boundary indices 0 = b0 < b1 < ... < bm = T plus costs in nats."""

    cuts: tuple[int, ...]
    total_cost: float
    per_segment_costs: tuple[float, ...]

    @property
    def segment_count(self) -> int:
        return len(self.cuts) - 1

    def unit_ranges(self) -> list[tuple[int, int]]:
        """Inclusive 0-based unit ranges, one per segment."""
        return [
            (self.cuts[i], self.cuts[i + 1] - 1) for i in range(len(self.cuts) - 1)
        ]


def cost_of_segment(
    seq: Sequence[ContentWord],
    k: int,
    params: CohesionParams | None = None,
    relations: RelationTable | None = None,
) -> float:
    """Cohesion cost of one candidate segment, evaluated directly.

    ``k`` is the count of distinct content lemmas in the whole document
    (with positive effective confidence), not just this segment.
    """
    params = params or CohesionParams()
    if k < 1:
        raise ValueError("k must be >= 1")
    lam = params.effective_lambda(relations)
    counts: dict[str, float] = {}
    order: list[str] = []
    n = 0.0
    for w in seq:
        phi = params.phi(w.confidence)
        if phi <= 0.0:
            continue
        if w.lemma not in counts:
            counts[w.lemma] = 0.0
            order.append(w.lemma)
        counts[w.lemma] += phi
        n += phi
    if n <= 0.0:
        return 0.0
    acc = 0.0
    for lemma in order:
        f = counts[lemma]
        f_rel = f
        if lam > 0.0 and relations is not None:
            for other, sim in relations.related(lemma):
                f_other = counts.get(other)
                if f_other:
                    f_rel += lam * sim * f_other
        acc += f * math.log(f_rel + 1.0)
    return n * math.log(n + k) - acc


def document_stats(
    units: Sequence[Sequence[ContentWord]],
    params: CohesionParams | None = None,
) -> tuple[dict[str, float], int, float]:
    """Confidence-weighted document lemma counts, vocabulary size k >= 1,
    and effective content length N."""
    params = params or CohesionParams()
    counts: dict[str, float] = {}
    n_total = 0.0
    for unit in units:
        for w in unit:
            phi = params.phi(w.confidence)
            if phi <= 0.0:
                continue
            counts[w.lemma] = counts.get(w.lemma, 0.0) + phi
            n_total += phi
    return counts, max(1, len(counts)), n_total


def _cost_table(
    units: Sequence[Sequence[ContentWord]],
    k: int,
    params: CohesionParams,
    relations: RelationTable | None,
) -> list[list[float]]:
    """Costs of every contiguous unit span.

    ``table[t][u]`` (1-based, u <= t) is the cost of the segment covering
    units u..t. Built by extending each span leftward with O(1) count and
    log-sum updates per word, so the whole table is O(T * document words).
    """
    T = len(units)
    lam = params.effective_lambda(relations)
    log = math.log
    table: list[list[float]] = [[] for _ in range(T + 1)]
    for t in range(1, T + 1):
        counts: dict[str, float] = {}
        f_rel: dict[str, float] = {}
        terms: dict[str, float] = {}
        total_terms = 0.0
        n = 0.0
        row = [0.0] * (t + 1)
        for u in range(t, 0, -1):
            for w in units[u - 1]:
                phi = params.phi(w.confidence)
                if phi <= 0.0:
                    continue
                lemma = w.lemma
                counts[lemma] = counts.get(lemma, 0.0) + phi
                f_rel[lemma] = f_rel.get(lemma, 0.0) + phi
                n += phi
                if lam > 0.0 and relations is not None:
                    for other, sim in relations.reverse(lemma):
                        f_rel[other] = f_rel.get(other, 0.0) + lam * sim * phi
                        if other in counts:
                            new = counts[other] * log(f_rel[other] + 1.0)
                            total_terms += new - terms.get(other, 0.0)
                            terms[other] = new
                new = counts[lemma] * log(f_rel[lemma] + 1.0)
                total_terms += new - terms.get(lemma, 0.0)
                terms[lemma] = new
            row[u] = n * log(n + k) - total_terms if n > 0.0 else 0.0
        table[t] = row
    return table


def _boundary_prior(units, params: CohesionParams) -> float:
    """Per-segment prior alpha * ln(N); N clamped to >= 1 so the prior never
    rewards fragmentation on near-empty documents."""
    n_total = 0.0
    for unit in units:
        for w in unit:
            phi = params.phi(w.confidence)
            if phi > 0.0:
                n_total += phi
    return params.alpha * math.log(max(n_total, 1.0))


def segment_document(
    units: Sequence[Sequence[ContentWord]],
    k: int,
    params: CohesionParams | None = None,
    relations: RelationTable | None = None,
) -> SegmentationResult:
    """Globally optimal segmentation over utterance boundaries.

    Minimizes sum of segment costs plus ``alpha * ln N`` per segment by
    dynamic programming. Ties resolve to fewer segments, then to the
    lexicographically smallest cut vector. Raises
    :class:`InfeasibleConstraints` when no cut set satisfies the
    min/max-unit bounds.
    """
    params = params or CohesionParams()
    if k < 1:
        raise ValueError("k must be >= 1")
    T = len(units)
    if T == 0:
        return SegmentationResult(cuts=(0,), total_cost=0.0, per_segment_costs=())

    table = _cost_table(units, k, params, relations)
    prior = _boundary_prior(units, params)
    max_units = params.max_units if params.max_units is not None else T

    # best[t] = (cost, segment count, cut vector) of the best split of units 1..t
    best: list[tuple[float, int, tuple[int, ...]] | None] = [None] * (T + 1)
    best[0] = (0.0, 0, (0,))
    for t in range(1, T + 1):
        lo = max(0, t - max_units)
        hi = t - params.min_units
        winner = None
        for s in range(lo, hi + 1):
            prev = best[s]
            if prev is None:
                continue
            cost = prev[0] + table[t][s + 1] + prior
            if winner is None or cost < winner[0]:
                winner = (cost, prev[1] + 1, prev[2] + (t,))
                continue
            if cost == winner[0]:
                m = prev[1] + 1
                if m < winner[1]:
                    winner = (cost, m, prev[2] + (t,))
                elif m == winner[1]:
                    cand_cuts = prev[2] + (t,)
                    if cand_cuts < winner[2]:
                        winner = (cost, m, cand_cuts)
        best[t] = winner

    final = best[T]
    if final is None:
        raise InfeasibleConstraints(
            f"no segmentation of {T} units with min_units={params.min_units}, "
            f"max_units={params.max_units}"
        )
    cost, _, cuts = final
    per_segment = tuple(
        table[cuts[i + 1]][cuts[i] + 1] for i in range(len(cuts) - 1)
    )
    return SegmentationResult(cuts=cuts, total_cost=cost, per_segment_costs=per_segment)


def brute_force_segment(
    units: Sequence[Sequence[ContentWord]],
    k: int,
    params: CohesionParams | None = None,
    relations: RelationTable | None = None,
) -> SegmentationResult:
    """Exhaustive search over all 2^(T-1) cut sets; the oracle for
    :func:`segment_document`, with the identical cost and tie rules."""
    params = params or CohesionParams()
    if k < 1:
        raise ValueError("k must be >= 1")
    T = len(units)
    if T > BRUTE_FORCE_MAX_UNITS:
        raise TooLarge(f"{T} units exceeds enumeration bound {BRUTE_FORCE_MAX_UNITS}")
    if T == 0:
        return SegmentationResult(cuts=(0,), total_cost=0.0, per_segment_costs=())

    table = _cost_table(units, k, params, relations)
    prior = _boundary_prior(units, params)
    max_units = params.max_units if params.max_units is not None else T

    winner: tuple[float, int, tuple[int, ...]] | None = None
    for mask in range(1 << (T - 1)):
        cuts = [0]
        for pos in range(1, T):
            if mask & (1 << (pos - 1)):
                cuts.append(pos)
        cuts.append(T)
        if any(
            not (params.min_units <= cuts[i + 1] - cuts[i] <= max_units)
            for i in range(len(cuts) - 1)
        ):
            continue
        cost = 0.0
        for i in range(len(cuts) - 1):
            cost = cost + table[cuts[i + 1]][cuts[i] + 1] + prior
        cand = (cost, len(cuts) - 1, tuple(cuts))
        if winner is None or _beats(cand, winner):
            winner = cand

    if winner is None:
        raise InfeasibleConstraints(
            f"no segmentation of {T} units with min_units={params.min_units}, "
            f"max_units={params.max_units}"
        )
    cost, _, cuts_t = winner
    per_segment = tuple(
        table[cuts_t[i + 1]][cuts_t[i] + 1] for i in range(len(cuts_t) - 1)
    )
    return SegmentationResult(cuts=cuts_t, total_cost=cost, per_segment_costs=per_segment)


def _beats(cand: tuple[float, int, tuple[int, ...]], cur: tuple[float, int, tuple[int, ...]]) -> bool:
    if cand[0] != cur[0]:
        return cand[0] < cur[0]
    if cand[1] != cur[1]:
        return cand[1] < cur[1]
    return cand[2] < cur[2]


def label_keywords(
    segment_seq: Sequence[ContentWord],
    doc_counts: dict[str, float],
    k: int,
    doc_length: float,
    params: CohesionParams | None = None,
) -> list[tuple[str, float]]:
    """Rank the lemmas that contributed most to a segment's cohesion.

    Scores each in-segment lemma by its count times the log-ratio of its
    segment-internal probability to its document probability (both Laplace
    smoothed); only positive scores are kept. Ties order lexicographically.
    """
    params = params or CohesionParams()
    f_seg: dict[str, float] = {}
    n_seg = 0.0
    for w in segment_seq:
        phi = params.phi(w.confidence)
        if phi <= 0.0:
            continue
        f_seg[w.lemma] = f_seg.get(w.lemma, 0.0) + phi
        n_seg += phi
    scored = []
    for lemma, f in f_seg.items():
        p_seg = (f + 1.0) / (n_seg + k)
        p_doc = (doc_counts.get(lemma, 0.0) + 1.0) / (doc_length + k)
        score = f * math.log(p_seg / p_doc)
        if score > 0.0:
            scored.append((lemma, score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[: params.top_k_keywords]
