"""Degree-structure-preserving randomisation and ensemble significance.

A replica is produced by permuting one endpoint column of the link list:
target-swap permutes targets, source-swap permutes sources, and both-swap
assigns each link to the source pool or the target pool by a fair draw and
permutes each pool's column within the pool. A link always carries its full
transaction record with it, so replica totals equal the empirical totals
exactly. Self-loops produced by the permutation are repaired by pairwise
exchanges within the permuted column (degree multisets stay intact); links
that land on the same ordered pair are merged.

An ensemble re-runs the topological categorisation on each replica and the
empirical category sizes are scored against the ensemble with z-scores,
robust z-scores, and an Anderson-Darling normality verdict per cell.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import AnalysisError
from .graph import LedgerGraph, LinkRecord
from .stats import AndersonDarlingResult, anderson_darling_normal, robust_z_score, z_score
from .topology import CATEGORY_ORDER, CategoryRow, categorize, category_stats
from .util import mix64

__all__ = [
    "SwapMode",
    "EnsembleSpec",
    "RandomizationError",
    "derive_seed",
    "randomize_endpoints",
    "randomize",
    "run_ensemble",
    "SignificanceCell",
    "significance",
    "FEATURES",
]

FEATURES: tuple[str, ...] = ("wcc_count", "node_count", "link_count", "tx_count", "volume")

_REPLICA_RETRIES = 3
_MIN_ENSEMBLE = 8


class SwapMode(str, Enum):
    TARGET = "target"
    SOURCE = "source"
    BOTH = "both"


@dataclass(frozen=True)
class EnsembleSpec:
    mode: SwapMode
    replicas: int = 1000
    master_seed: int = 0
    max_repair_attempts: int = 100

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")


class RandomizationError(AnalysisError):
    """Self-loop repair budget exhausted; carries the offending seed."""

    def __init__(self, seed: int, position: int):
        super().__init__(f"could not repair self-loop at link {position} (seed {seed})")
        self.seed = seed


def derive_seed(master_seed: int, index: int) -> int:
    """Replica seed from (master seed, replica index); fixed 64-bit mixing."""
    return mix64(master_seed, index)


def randomize_endpoints(
    g: LedgerGraph,
    mode: SwapMode,
    seed: int,
    max_repair_attempts: int = 100,
) -> list[tuple[str, str, LinkRecord]]:
    """Swapped link list before merging parallel links.

    Deterministic in (graph, mode, seed). Raises
    :class:`RandomizationError` when a self-loop cannot be repaired within
    the attempt budget.
    """
    triples = g.link_list()
    sources = [s for s, _, _ in triples]
    targets = [t for _, t, _ in triples]
    records = [rec for _, _, rec in triples]
    m = len(triples)
    if m <= 1:
        return triples

    rng = np.random.default_rng(seed & (2**64 - 1))
    pool = None
    if mode is SwapMode.BOTH:
        pool = rng.integers(0, 2, size=m)
        source_idx = np.flatnonzero(pool == 0)
        target_idx = np.flatnonzero(pool == 1)
        perm_s = source_idx[rng.permutation(source_idx.size)]
        new_sources = list(sources)
        for pos, j in zip(source_idx, perm_s):
            new_sources[pos] = sources[j]
        perm_t = target_idx[rng.permutation(target_idx.size)]
        new_targets = list(targets)
        for pos, j in zip(target_idx, perm_t):
            new_targets[pos] = targets[j]
        sources, targets = new_sources, new_targets
    elif mode is SwapMode.TARGET:
        perm = rng.permutation(m)
        targets = [targets[j] for j in perm]
    elif mode is SwapMode.SOURCE:
        perm = rng.permutation(m)
        sources = [sources[j] for j in perm]
    else:
        raise ValueError(f"unknown swap mode: {mode!r}")

    # Repair self-loops by exchanging the permuted-column entry with a
    # random partner; a swap inside one column never changes its multiset.
    for i in range(m):
        if sources[i] != targets[i]:
            continue
        if mode is SwapMode.SOURCE or (mode is SwapMode.BOTH and pool[i] == 0):
            column = sources
            fixed = targets
        else:
            column = targets
            fixed = sources
        repaired = False
        for _ in range(max_repair_attempts):
            j = int(rng.integers(0, m))
            if j == i:
                continue
            # After the exchange neither position may be a self-loop.
            if fixed[i] == column[j] or fixed[j] == column[i]:
                continue
            column[i], column[j] = column[j], column[i]
            repaired = True
            break
        if not repaired:
            raise RandomizationError(seed, i)

    return list(zip(sources, targets, records))


def randomize(
    g: LedgerGraph,
    mode: SwapMode,
    seed: int,
    max_repair_attempts: int = 100,
) -> LedgerGraph:
    """One randomised replica; parallel links merged by record concatenation."""
    merged: dict[tuple[str, str], LinkRecord] = {}
    for source, target, record in randomize_endpoints(g, mode, seed, max_repair_attempts):
        key = (source, target)
        merged[key] = merged[key].merged(record) if key in merged else record
    return LedgerGraph(merged)


def _replica(g: LedgerGraph, spec: EnsembleSpec, index: int) -> LedgerGraph:
    seed = derive_seed(spec.master_seed, index)
    for attempt in range(_REPLICA_RETRIES + 1):
        try:
            return randomize(g, spec.mode, seed, spec.max_repair_attempts)
        except RandomizationError:
            if attempt == _REPLICA_RETRIES:
                raise
            seed = derive_seed(derive_seed(spec.master_seed, index), attempt + 1)
    raise AssertionError("unreachable")


def _replica_stats(g: LedgerGraph, spec: EnsembleSpec, index: int) -> dict[str, CategoryRow]:
    replica = _replica(g, spec, index)
    return category_stats(replica, categorize(replica))


_WORKER_STATE: dict = {}


def _init_worker(g: LedgerGraph, spec: EnsembleSpec, fn) -> None:
    _WORKER_STATE["graph"] = g
    _WORKER_STATE["spec"] = spec
    _WORKER_STATE["fn"] = fn


def _run_worker(index: int):
    return _WORKER_STATE["fn"](_WORKER_STATE["graph"], _WORKER_STATE["spec"], index)


def ensemble_map(
    g: LedgerGraph,
    spec: EnsembleSpec,
    fn: Callable[[LedgerGraph, EnsembleSpec, int], object],
    jobs: int = 1,
) -> list:
    """Apply ``fn(graph, spec, replica_index)`` over the ensemble.

    Results are ordered by replica index regardless of worker scheduling,
    so output is identical for any job count.
    """
    indices = range(spec.replicas)
    if jobs <= 1:
        return [fn(g, spec, i) for i in indices]
    chunk = max(1, spec.replicas // (jobs * 4))
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(g, spec, fn)
    ) as executor:
        return list(executor.map(_run_worker, indices, chunksize=chunk))


def run_ensemble(
    g: LedgerGraph,
    spec: EnsembleSpec,
    jobs: int = 1,
) -> list[dict[str, CategoryRow]]:
    """Category statistics of every replica, in replica-index order."""
    return ensemble_map(g, spec, _replica_stats, jobs=jobs)


@dataclass(frozen=True)
class SignificanceCell:
    """Empirical value of one (category, feature) scored against the ensemble."""

    category: str
    feature: str
    empirical: float
    null_mean: float
    null_sd: float
    null_median: float
    null_iqr: float
    z: float | None
    robust_z: float | None
    ad_statistic: float | None
    ad_p_value: float | None
    normality: str            # "rejected" | "not_rejected"
    preferred: str            # "z" when normality holds, else "robust_z"


def _cell(category: str, feature: str, empirical: float, samples: np.ndarray) -> SignificanceCell:
    q1, q2, q3 = np.quantile(samples, [0.25, 0.5, 0.75])
    ad: AndersonDarlingResult = anderson_darling_normal(samples)
    return SignificanceCell(
        category=category,
        feature=feature,
        empirical=float(empirical),
        null_mean=float(samples.mean()),
        null_sd=float(samples.std(ddof=1)),
        null_median=float(q2),
        null_iqr=float(q3 - q1),
        z=z_score(empirical, samples),
        robust_z=robust_z_score(empirical, samples),
        ad_statistic=None if np.isinf(ad.statistic) else ad.statistic,
        ad_p_value=ad.p_value,
        normality=ad.verdict,
        preferred="robust_z" if ad.rejected else "z",
    )


def significance(
    empirical: Mapping[str, CategoryRow],
    ensemble: Sequence[Mapping[str, CategoryRow]],
    features: tuple[str, ...] = FEATURES,
) -> list[SignificanceCell]:
    """Score empirical category sizes against a replica ensemble.

    A category absent from a replica contributes zero for every feature in
    that replica (its table row is materialised as zeros). Requires at
    least 8 replicas for the Anderson-Darling approximation.
    """
    if len(ensemble) < _MIN_ENSEMBLE:
        raise AnalysisError(f"ensemble of {len(ensemble)} is below the minimum of {_MIN_ENSEMBLE}")
    zero = CategoryRow(0, 0, 0, 0, 0, Decimal(0))
    cells = []
    for category in CATEGORY_ORDER:
        emp_row = empirical.get(category, zero)
        for feature in features:
            samples = np.array(
                [float(getattr(stats.get(category, zero), feature)) for stats in ensemble]
            )
            cells.append(_cell(category, feature, float(getattr(emp_row, feature)), samples))
    return cells
