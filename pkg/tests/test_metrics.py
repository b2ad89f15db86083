import random

import pytest

from segsearch.metrics import pk_metric, windowdiff_metric


def naive_pk(reference, hypothesis, total_units):
    """Straightforward Pk via explicit segment-id arrays."""
    ref_ids = seg_ids(reference, total_units)
    hyp_ids = seg_ids(hypothesis, total_units)
    m_ref = max(1, len(reference) - 1)
    w = max(1, round(total_units / (2 * m_ref)))
    pairs = total_units - w
    if pairs <= 0:
        return 0.0
    wrong = 0
    for i in range(pairs):
        same_ref = ref_ids[i] == ref_ids[i + w]
        same_hyp = hyp_ids[i] == hyp_ids[i + w]
        if same_ref != same_hyp:
            wrong += 1
    return wrong / pairs


def naive_windowdiff(reference, hypothesis, total_units):
    ref_ids = seg_ids(reference, total_units)
    hyp_ids = seg_ids(hypothesis, total_units)
    m_ref = max(1, len(reference) - 1)
    w = max(1, round(total_units / (2 * m_ref)))
    windows = total_units - w
    if windows <= 0:
        return 0.0
    wrong = 0
    for i in range(windows):
        b_ref = sum(1 for u in range(i, i + w) if ref_ids[u] != ref_ids[u + 1])
        b_hyp = sum(1 for u in range(i, i + w) if hyp_ids[u] != hyp_ids[u + 1])
        if b_ref != b_hyp:
            wrong += 1
    return wrong / windows


def seg_ids(cuts, total_units):
    ids = []
    seg = 0
    boundaries = set(cuts[1:-1])
    for unit in range(total_units):
        ids.append(seg)
        if unit + 1 in boundaries:
            seg += 1
    return ids


def random_cuts(rng, total_units):
    internal = sorted(rng.sample(range(1, total_units), rng.randint(0, total_units - 1))) if total_units > 1 else []
    return [0] + internal + [total_units]


def test_perfect_match_is_zero():
    assert pk_metric([0, 5, 10], [0, 5, 10], 10) == 0.0
    assert windowdiff_metric([0, 5, 10], [0, 5, 10], 10) == 0.0


def test_single_segment_both_sides():
    assert pk_metric([0, 7], [0, 7], 7) == 0.0
    assert windowdiff_metric([0, 7], [0, 7], 7) == 0.0


def test_missed_boundary_matches_naive():
    ref, hyp, units = [0, 5, 10], [0, 10], 10
    assert pk_metric(ref, hyp, units) == pytest.approx(naive_pk(ref, hyp, units))
    assert windowdiff_metric(ref, hyp, units) == pytest.approx(
        naive_windowdiff(ref, hyp, units)
    )
    assert pk_metric(ref, hyp, units) > 0


def test_empty_document():
    assert pk_metric([0], [0], 0) == 0.0
    assert windowdiff_metric([0], [0], 0) == 0.0


def test_invalid_cuts_rejected():
    with pytest.raises(ValueError):
        pk_metric([0, 4], [1, 4], 4)
    with pytest.raises(ValueError):
        pk_metric([0, 3, 2, 4], [0, 4], 4)
    with pytest.raises(ValueError):
        windowdiff_metric([0, 5], [0, 4], 4)


def test_metrics_bounded_unit_interval():
    rng = random.Random(5)
    for _ in range(200):
        units = rng.randint(1, 25)
        ref = random_cuts(rng, units)
        hyp = random_cuts(rng, units)
        for metric in (pk_metric, windowdiff_metric):
            value = metric(ref, hyp, units)
            assert 0.0 <= value <= 1.0


def test_agreement_with_naive_oracle_on_random_pairs():
    rng = random.Random(2024)
    for _ in range(1000):
        units = rng.randint(1, 30)
        ref = random_cuts(rng, units)
        hyp = random_cuts(rng, units)
        assert pk_metric(ref, hyp, units) == pytest.approx(
            naive_pk(ref, hyp, units), abs=1e-12
        )
        assert windowdiff_metric(ref, hyp, units) == pytest.approx(
            naive_windowdiff(ref, hyp, units), abs=1e-12
        )
