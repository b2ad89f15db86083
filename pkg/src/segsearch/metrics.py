"""Boundary-error metrics for comparing segmentations.

Both metrics slide a window of width w = round(T / (2 * m_ref)) over the
unit sequence. Pk counts windows whose endpoints disagree on being in the
same segment; WindowDiff counts windows whose internal boundary counts
differ. A reference with no internal boundaries is treated as one segment
(the metrics stay defined).
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Sequence


def _validate(cuts: Sequence[int], total_units: int, name: str) -> list[int]:
    cuts = list(cuts)
    if total_units == 0:
        if cuts not in ([0], []):
            raise ValueError(f"{name} cuts must be [0] for an empty document")
        return []
    if not cuts or cuts[0] != 0 or cuts[-1] != total_units:
        raise ValueError(f"{name} cuts must start at 0 and end at {total_units}")
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            raise ValueError(f"{name} cuts must be strictly increasing")
    return cuts[1:-1]  # internal boundaries only


def _window(total_units: int, reference_internal: list[int]) -> int:
    m_ref = max(1, len(reference_internal) + 1)
    return max(1, round(total_units / (2 * m_ref)))


def pk_metric(
    reference: Sequence[int], hypothesis: Sequence[int], total_units: int
) -> float:
    """Fraction of unit pairs (i, i+w) whose same-segment status disagrees."""
    ref = _validate(reference, total_units, "reference")
    hyp = _validate(hypothesis, total_units, "hypothesis")
    if total_units == 0:
        return 0.0
    w = _window(total_units, ref)
    if total_units - w <= 0:
        return 0.0
    disagreements = 0
    for i in range(total_units - w):
        # units i and i+w are in the same segment iff no boundary in (i, i+w]
        same_ref = bisect_right(ref, i + w) == bisect_right(ref, i)
        same_hyp = bisect_right(hyp, i + w) == bisect_right(hyp, i)
        if same_ref != same_hyp:
            disagreements += 1
    return disagreements / (total_units - w)


def windowdiff_metric(
    reference: Sequence[int], hypothesis: Sequence[int], total_units: int
) -> float:
    """Fraction of windows whose internal boundary counts differ."""
    ref = _validate(reference, total_units, "reference")
    hyp = _validate(hypothesis, total_units, "hypothesis")
    if total_units == 0:
        return 0.0
    w = _window(total_units, ref)
    if total_units - w <= 0:
        return 0.0
    differing = 0
    for i in range(total_units - w):
        b_ref = bisect_right(ref, i + w) - bisect_right(ref, i)
        b_hyp = bisect_right(hyp, i + w) - bisect_right(hyp, i)
        if b_ref != b_hyp:
            differing += 1
    return differing / (total_units - w)
