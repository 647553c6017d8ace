import random
from collections import Counter
from decimal import Decimal

import pytest

from ledgerflow.graph import LedgerGraph
from ledgerflow.nullmodel import (
    EnsembleSpec,
    RandomizationError,
    SwapMode,
    derive_seed,
    randomize,
    randomize_endpoints,
    run_ensemble,
    significance,
)
from ledgerflow.errors import AnalysisError
from ledgerflow.topology import CategoryRow
from ledgerflow.util import dsum, mix64

from conftest import random_digraph

MODES = (SwapMode.TARGET, SwapMode.SOURCE, SwapMode.BOTH)


def test_single_link_graph_unchanged():
    g = LedgerGraph.from_edges([("A", "B")])
    for mode in MODES:
        replica = randomize(g, mode, seed=7)
        assert replica.links == g.links


def test_two_links_target_swap_is_fair():
    g = LedgerGraph.from_edges([("A", "B"), ("C", "D")])
    outcomes = Counter()
    for seed in range(10_000):
        replica = randomize(g, SwapMode.TARGET, seed)
        outcomes[tuple(sorted(replica.links))] += 1
    identity = outcomes[(("A", "B"), ("C", "D"))]
    crossed = outcomes[(("A", "D"), ("C", "B"))]
    assert identity + crossed == 10_000
    assert abs(identity - 5_000) <= 200  # 50% each within 2 points


@pytest.mark.parametrize("mode", MODES)
def test_degree_multisets_preserved_pre_merge(mode):
    rng = random.Random(31)
    for _ in range(20):
        g = random_digraph(rng, 60)
        triples = randomize_endpoints(g, mode, seed=rng.randrange(2**60))
        sources = Counter(s for s, _, _ in triples)
        targets = Counter(t for _, t, _ in triples)
        assert sources == Counter(s for s, _, _ in g.link_list())
        assert targets == Counter(t for _, t, _ in g.link_list())
        assert all(s != t for s, t, _ in triples)


@pytest.mark.parametrize("mode", MODES)
def test_conservation_exact(mode):
    rng = random.Random(17)
    for seed in range(10):
        g = random_digraph(rng, 80)
        replica = randomize(g, mode, seed)
        assert replica.tx_count == g.tx_count
        assert replica.volume == g.volume
        assert replica.link_count <= g.link_count


def test_bit_identical_for_same_seed():
    rng = random.Random(5)
    g = random_digraph(rng, 100)
    for mode in MODES:
        a = randomize(g, mode, seed=123456789)
        b = randomize(g, mode, seed=123456789)
        assert a.links == b.links
        c = randomize(g, mode, seed=987654321)
        if c.links != a.links:
            break
    else:
        pytest.fail("different seeds never changed the replica")


def test_mutual_dyad_repair():
    # Target permutation over {A->B, B->A} yields two self-loops half the
    # time; repair must always produce a loop-free replica.
    g = LedgerGraph.from_edges([("A", "B"), ("B", "A")])
    for seed in range(200):
        replica = randomize(g, SwapMode.TARGET, seed)
        assert replica.links == g.links


def test_repair_budget_exhaustion_raises():
    # A -> B plus many A -> x links: any loop at (A, A) is repairable only
    # with a partner whose target is not A; zero attempts must fail fast.
    g = LedgerGraph.from_edges([("A", "B"), ("B", "A")])
    with pytest.raises(RandomizationError, match="seed"):
        for seed in range(50):
            randomize(g, SwapMode.TARGET, seed, max_repair_attempts=0)


def test_derive_seed_is_frozen():
    # Pinned values guard the mixing function against silent change; any
    # edit here breaks replica reproducibility across versions.
    assert mix64(0, 0) == 16294208416658607535
    assert mix64(0, 1) == 7960286522194355700
    assert mix64(1, 0) == 10451216379200822465
    assert derive_seed(42, 7) == mix64(42, 7) == 14769051326987775908
    assert derive_seed(42, 7) != derive_seed(42, 8)


def test_run_ensemble_deterministic():
    rng = random.Random(5)
    g = random_digraph(rng, 40)
    spec = EnsembleSpec(mode=SwapMode.TARGET, replicas=1, master_seed=99)
    assert run_ensemble(g, spec) == run_ensemble(g, spec)


def test_run_ensemble_conserves_totals():
    rng = random.Random(8)
    g = random_digraph(rng, 50)
    spec = EnsembleSpec(mode=SwapMode.BOTH, replicas=12, master_seed=3)
    for stats in run_ensemble(g, spec):
        assert sum(r.tx_count for r in stats.values()) == g.tx_count
        assert dsum(r.volume for r in stats.values()) == g.volume


def test_run_ensemble_parallel_matches_serial():
    rng = random.Random(21)
    g = random_digraph(rng, 40)
    spec = EnsembleSpec(mode=SwapMode.TARGET, replicas=8, master_seed=11)
    assert run_ensemble(g, spec, jobs=2) == run_ensemble(g, spec, jobs=1)


def test_randomization_concentrates_cyclic_mass():
    # On a dense-enough random digraph the shuffle leaves exactly one
    # strongly connected component in nearly every replica.
    rng = random.Random(2)
    pairs = set()
    while len(pairs) < 800:
        a, b = rng.randrange(200), rng.randrange(200)
        if a != b:
            pairs.add((f"v{a:03d}", f"v{b:03d}"))
    g = LedgerGraph.from_edges(sorted(pairs))
    spec = EnsembleSpec(mode=SwapMode.TARGET, replicas=100, master_seed=77)
    single = sum(
        1 for stats in run_ensemble(g, spec)
        if sum(r.scc_count for r in stats.values()) == 1
    )
    assert single >= 95


def _row(value: int) -> CategoryRow:
    return CategoryRow(0, value, value, value, value, Decimal(value))


def test_significance_z_zero_at_null_mean():
    empirical = {"dag0": _row(4)}
    ensemble = [{"dag0": _row(v)} for v in (2, 4, 6, 5, 3, 4, 4, 4)]
    cells = significance(empirical, ensemble)
    cell = next(c for c in cells if c.category == "dag0" and c.feature == "node_count")
    assert cell.z == pytest.approx(0.0, abs=1e-12)


def test_significance_absent_category_counts_as_zero():
    empirical = {"dag0": _row(10)}
    ensemble = [{} for _ in range(8)]
    cells = significance(empirical, ensemble)
    cell = next(c for c in cells if c.category == "dag0" and c.feature == "tx_count")
    assert cell.null_mean == 0.0
    assert cell.z is None          # zero spread in the nulls
    assert cell.robust_z is None
    assert cell.normality == "rejected"


def test_significance_requires_eight_replicas():
    with pytest.raises(AnalysisError):
        significance({}, [{} for _ in range(7)])


def test_significance_preferred_score_follows_normality():
    rng = random.Random(2)
    values = [rng.gauss(100, 10) for _ in range(400)]
    ensemble = [{"dag0": _row(int(v))} for v in values]
    cells = significance({"dag0": _row(130)}, ensemble)
    cell = next(c for c in cells if c.category == "dag0" and c.feature == "node_count")
    assert cell.preferred == ("robust_z" if cell.normality == "rejected" else "z")
    assert cell.z is not None and cell.robust_z is not None
