"""Recirculation operations: per-user first-in to last-out windows.

For each user, incoming transactions open a window; once outgoing
transactions follow, the next incoming transaction closes the window as one
recirculation operation (an in-run followed by an out-run at end of stream
also closes). The operation's duration, last-out minus first-in, drives a
quartile split into the frequency categories HFQ1 (fastest) through LFQ3
(slowest), and each user is signed with the set of categories their
operations fall into.

Equal timestamps order a user's incoming transactions before its outgoing
ones (funds arrive before they move), sub-ordered by transaction id.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DataError
from .graph import LedgerGraph
from .ingest import Transaction
from .topology import TopologyPartition
from .util import dsum

__all__ = [
    "FrequencyCategory",
    "RecirculationOp",
    "QuartileBoundaries",
    "DurationMode",
    "ClassifiedOps",
    "TemporalSignature",
    "RecirculationCoverage",
    "CrosstabResult",
    "extract_ops",
    "classify_ops",
    "user_signatures",
    "crosstab",
]


class FrequencyCategory(str, Enum):
    HFQ1 = "HFQ1"
    HFQ2 = "HFQ2"
    HFQ3 = "HFQ3"
    LFQ3 = "LFQ3"


_CATEGORY_RANK = {c: i for i, c in enumerate(FrequencyCategory)}


@dataclass(frozen=True)
class RecirculationOp:
    """One first-in to last-out window of one user."""

    user: str
    first_in: int
    last_out: int
    in_tx_ids: tuple[str, ...]
    out_tx_ids: tuple[str, ...]

    @property
    def duration(self) -> int:
        return self.last_out - self.first_in


def extract_ops(transactions: Sequence[Transaction]) -> list[RecirculationOp]:
    """All recirculation operations, grouped by user and in time order.

    Outgoing transactions before a user's first incoming one belong to no
    operation, and a trailing in-run without any outgoing transaction
    yields none.
    """
    # Per-user event streams; 0 sorts incoming before outgoing on ties.
    events: dict[str, list[tuple[int, int, str]]] = {}
    for tx in transactions:
        events.setdefault(tx.target, []).append((tx.timestamp, 0, tx.tx_id))
        events.setdefault(tx.source, []).append((tx.timestamp, 1, tx.tx_id))

    ops: list[RecirculationOp] = []
    for user in sorted(events):
        stream = sorted(events[user])
        in_run: list[tuple[int, str]] = []
        out_run: list[tuple[int, str]] = []
        for timestamp, direction, tx_id in stream:
            if direction == 0:
                if out_run:
                    ops.append(_close(user, in_run, out_run))
                    in_run, out_run = [], []
                in_run.append((timestamp, tx_id))
            else:
                if in_run:
                    out_run.append((timestamp, tx_id))
                # else: outgoing before any incoming, belongs to no op
        if in_run and out_run:
            ops.append(_close(user, in_run, out_run))
    return ops


def _close(user, in_run, out_run) -> RecirculationOp:
    return RecirculationOp(
        user=user,
        first_in=in_run[0][0],
        last_out=out_run[-1][0],
        in_tx_ids=tuple(tx_id for _, tx_id in in_run),
        out_tx_ids=tuple(tx_id for _, tx_id in out_run),
    )


@dataclass(frozen=True)
class QuartileBoundaries:
    q1: float
    q2: float
    q3: float


@dataclass(frozen=True)
class DurationMode:
    value: int
    count: int


@dataclass(frozen=True)
class ClassifiedOps:
    """Operations with their quartile boundaries and category labels."""

    ops: tuple[RecirculationOp, ...]
    boundaries: QuartileBoundaries
    categories: tuple[FrequencyCategory, ...]
    modes: dict[FrequencyCategory, DurationMode | None]
    global_mode: DurationMode


def _mode(durations: list[int]) -> DurationMode | None:
    if not durations:
        return None
    counter = Counter(durations)
    value, count = min(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    return DurationMode(value=value, count=count)


def classify_ops(ops: Sequence[RecirculationOp]) -> ClassifiedOps:
    """Quartile split of the duration distribution (linear interpolation).

    HFQ1: d <= Q1;  HFQ2: Q1 < d <= Q2;  HFQ3: Q2 < d <= Q3;  LFQ3: d > Q3.
    """
    if not ops:
        raise DataError("classify_ops needs at least one operation")
    durations = [op.duration for op in ops]
    q1, q2, q3 = (float(q) for q in np.quantile(np.array(durations, dtype=float), [0.25, 0.5, 0.75]))

    categories: list[FrequencyCategory] = []
    per_cat: dict[FrequencyCategory, list[int]] = {c: [] for c in FrequencyCategory}
    for d in durations:
        if d <= q1:
            cat = FrequencyCategory.HFQ1
        elif d <= q2:
            cat = FrequencyCategory.HFQ2
        elif d <= q3:
            cat = FrequencyCategory.HFQ3
        else:
            cat = FrequencyCategory.LFQ3
        categories.append(cat)
        per_cat[cat].append(d)

    return ClassifiedOps(
        ops=tuple(ops),
        boundaries=QuartileBoundaries(q1, q2, q3),
        categories=tuple(categories),
        modes={c: _mode(values) for c, values in per_cat.items()},
        global_mode=_mode(durations),
    )


@dataclass(frozen=True)
class TemporalSignature:
    """The set of frequency categories a user's operations fall into."""

    user: str
    categories: frozenset[FrequencyCategory]

    @property
    def key(self) -> str:
        ordered = sorted(self.categories, key=_CATEGORY_RANK.__getitem__)
        return "-".join(c.value for c in ordered)


def user_signatures(classified: ClassifiedOps) -> list[TemporalSignature]:
    """One signature per user with at least one operation, sorted by user."""
    per_user: dict[str, set[FrequencyCategory]] = {}
    for op, category in zip(classified.ops, classified.categories):
        per_user.setdefault(op.user, set()).add(category)
    return [
        TemporalSignature(user=user, categories=frozenset(cats))
        for user, cats in sorted(per_user.items())
    ]


@dataclass(frozen=True)
class RecirculationCoverage:
    op_count: int
    tx_in_ops: int
    tx_share: float
    volume_in_ops: Decimal
    volume_share: float
    tx_counted_twice: int
    recirculating_users: int
    user_share: float


@dataclass(frozen=True)
class CrosstabResult:
    """Recirculation traffic against the topological partition.

    ``tx_table``: per link-category label, member transactions by frequency
    category; a transaction inside two operations (outgoing of one user's,
    incoming of another's) counts once per operation. ``user_table``:
    recirculating users by node category and signature key.
    """

    tx_table: dict[str, dict[str, int]]
    user_table: dict[str, dict[str, int]]
    coverage: RecirculationCoverage


def crosstab(
    g: LedgerGraph,
    partition: TopologyPartition,
    classified: ClassifiedOps,
    signatures: Sequence[TemporalSignature],
    transactions: Sequence[Transaction],
) -> CrosstabResult:
    """Cross-tabulate operations against topology; inputs must share a ledger."""
    link_of_tx: dict[str, tuple[str, str]] = {}
    for pair, record in g.links.items():
        for tx_id in record.tx_ids:
            link_of_tx[tx_id] = pair
    amount_of_tx = {tx.tx_id: tx.amount for tx in transactions}

    tx_table: dict[str, dict[str, int]] = {}
    memberships: Counter[str] = Counter()
    for op, category in zip(classified.ops, classified.categories):
        for tx_id in op.in_tx_ids + op.out_tx_ids:
            pair = link_of_tx.get(tx_id)
            if pair is None:
                raise DataError(f"operation transaction {tx_id!r} is not in the graph")
            label = partition.edge_label(pair)
            row = tx_table.setdefault(label, {c.value: 0 for c in FrequencyCategory})
            row[category.value] += 1
            memberships[tx_id] += 1

    user_table: dict[str, dict[str, int]] = {}
    for signature in signatures:
        node_label = partition.node_category[signature.user].value
        row = user_table.setdefault(node_label, {})
        row[signature.key] = row.get(signature.key, 0) + 1

    member_ids = set(memberships)
    missing = member_ids - amount_of_tx.keys()
    if missing:
        raise DataError(f"{len(missing)} operation transactions missing from the transaction list")
    volume_in_ops = dsum(amount_of_tx[tx_id] for tx_id in sorted(member_ids))
    coverage = RecirculationCoverage(
        op_count=len(classified.ops),
        tx_in_ops=len(member_ids),
        tx_share=len(member_ids) / g.tx_count if g.tx_count else 0.0,
        volume_in_ops=volume_in_ops,
        volume_share=float(volume_in_ops / g.volume) if g.volume else 0.0,
        tx_counted_twice=sum(1 for count in memberships.values() if count == 2),
        recirculating_users=len(signatures),
        user_share=len(signatures) / g.node_count if g.node_count else 0.0,
    )
    return CrosstabResult(tx_table=tx_table, user_table=user_table, coverage=coverage)
