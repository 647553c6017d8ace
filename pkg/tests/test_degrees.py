from decimal import Decimal

import numpy as np
import pytest

from ledgerflow.degrees import (
    degree_stats,
    fit_continuous_power_law,
    fit_discrete_power_law,
)
from ledgerflow.graph import LedgerGraph, LinkRecord, aggregate

from oracles import sample_discrete_power_law


def _graph_with_volumes(volumes):
    links = {
        (f"s{i:03d}", f"t{i:03d}"): LinkRecord((f"x{i:03d}",), 1, Decimal(str(v)))
        for i, v in enumerate(volumes)
    }
    return LedgerGraph(links)


def test_pearson_is_one_for_count_equal_volume():
    links = {}
    for i, count in enumerate([1, 2, 3, 5, 8]):
        ids = tuple(f"x{i}_{k}" for k in range(count))
        links[(f"s{i}", f"t{i}")] = LinkRecord(ids, count, Decimal(count))
    stats = degree_stats(LedgerGraph(links))
    assert stats.pearson_tx_vs_volume == pytest.approx(1.0)


def test_pearson_undefined_for_zero_variance():
    stats = degree_stats(_graph_with_volumes([5, 5, 5]))
    assert stats.pearson_tx_vs_volume is None


def test_pearson_affine_invariance():
    volumes = [3, 1, 4, 1, 5, 9, 2, 6]
    counts = [1, 2, 1, 3, 2, 4, 1, 2]

    def build(scale, shift):
        links = {}
        for i, (count, volume) in enumerate(zip(counts, volumes)):
            ids = tuple(f"x{i}_{k}" for k in range(count))
            links[(f"s{i}", f"t{i}")] = LinkRecord(
                ids, count, Decimal(str(scale * volume + shift))
            )
        return LedgerGraph(links)

    base = degree_stats(build(1, 0)).pearson_tx_vs_volume
    scaled = degree_stats(build(7, 13)).pearson_tx_vs_volume
    assert scaled == pytest.approx(base, abs=1e-12)
    flipped = degree_stats(build(-7, 100)).pearson_tx_vs_volume
    assert flipped == pytest.approx(-base, abs=1e-12)


def test_degree_histograms():
    g = LedgerGraph.from_edges([("A", "B"), ("A", "C"), ("B", "C")])
    stats = degree_stats(g)
    assert stats.out_degree_hist == {2: 1, 1: 1, 0: 1}
    assert stats.in_degree_hist == {0: 1, 1: 1, 2: 1}


def test_degree_stats_requires_nonempty():
    g, _ = aggregate([])
    with pytest.raises(ValueError):
        degree_stats(g)


def test_discrete_power_law_recovery():
    # Exact inverse-CDF samples at alpha = 2.5; the fit must land within 0.05.
    rng = np.random.default_rng(2024)
    samples = sample_discrete_power_law(2.5, 100_000, rng)
    fit = fit_discrete_power_law(samples)
    assert fit.reliable
    assert fit.alpha == pytest.approx(2.5, abs=0.05)


def test_continuous_power_law_recovery():
    rng = np.random.default_rng(11)
    # Inverse CDF for the continuous Pareto tail: x = xmin * u^(-1/(alpha-1)).
    samples = 1.0 * rng.random(50_000) ** (-1.0 / 1.85)
    fit = fit_continuous_power_law(samples)
    assert fit.reliable
    assert fit.alpha == pytest.approx(2.85, abs=0.05)


def test_few_distinct_values_marked_unreliable():
    fit = fit_discrete_power_law([1, 1, 2, 2, 2, 3, 3, 1, 2, 3])
    assert not fit.reliable


def test_degenerate_series_fails_cleanly():
    fit = fit_discrete_power_law([2, 2, 2, 2])
    assert fit.alpha is None
    assert not fit.reliable
