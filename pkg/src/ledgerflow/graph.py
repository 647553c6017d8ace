"""The aggregated transaction graph.

Transactions are aggregated into a weighted directed simple graph: one link
per ordered (source, target) pair, carrying the ids, count, and exact volume
of its transactions. Self-transfers are dropped during aggregation (a
self-loop has no place in the topological categorisation) and reported in a
diagnostics record.

Graphs are immutable once built and all adjacency is pre-sorted, so every
downstream traversal is deterministic regardless of input ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Mapping, Sequence

from .errors import DataError
from .ingest import Transaction
from .util import dsum

__all__ = ["LinkRecord", "LedgerGraph", "AggregateDiagnostics", "aggregate"]


@dataclass(frozen=True)
class LinkRecord:
    """All transactions aggregated onto one ordered node pair."""

    tx_ids: tuple[str, ...]
    count: int
    volume: Decimal

    def merged(self, other: "LinkRecord") -> "LinkRecord":
        return LinkRecord(self.tx_ids + other.tx_ids, self.count + other.count,
                          self.volume + other.volume)


@dataclass(frozen=True)
class AggregateDiagnostics:
    self_transfers_dropped: int


class LedgerGraph:
    """Weighted directed simple graph over account ids.

    Nodes are exactly the endpoints of links; aggregation never creates
    isolated nodes. ``links`` maps ordered (source, target) pairs to their
    :class:`LinkRecord` and iterates in sorted order.
    """

    __slots__ = ("links", "nodes", "out_adj", "in_adj", "tx_count", "volume")

    def __init__(self, links: Mapping[tuple[str, str], LinkRecord]):
        ordered = dict(sorted(links.items()))
        out_adj: dict[str, list[str]] = {}
        in_adj: dict[str, list[str]] = {}
        tx_count = 0
        for (source, target), record in ordered.items():
            if source == target:
                raise DataError(f"self-loop link {source!r} is not allowed")
            if record.count != len(record.tx_ids):
                raise DataError(f"link {source}->{target}: count {record.count} "
                                f"!= {len(record.tx_ids)} transaction ids")
            out_adj.setdefault(source, []).append(target)
            out_adj.setdefault(target, [])
            in_adj.setdefault(target, []).append(source)
            in_adj.setdefault(source, [])
            tx_count += record.count
        self.links: dict[tuple[str, str], LinkRecord] = ordered
        self.nodes: tuple[str, ...] = tuple(sorted(out_adj))
        self.out_adj: dict[str, tuple[str, ...]] = {v: tuple(ns) for v, ns in sorted(out_adj.items())}
        self.in_adj: dict[str, tuple[str, ...]] = {v: tuple(sorted(ns)) for v, ns in sorted(in_adj.items())}
        self.tx_count: int = tx_count
        self.volume: Decimal = dsum(r.volume for r in ordered.values())

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def link_count(self) -> int:
        return len(self.links)

    def link_list(self) -> list[tuple[str, str, LinkRecord]]:
        """Links as (source, target, record) triples in sorted order."""
        return [(s, t, rec) for (s, t), rec in self.links.items()]

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str]],
        amount: Decimal = Decimal(1),
    ) -> "LedgerGraph":
        """Build a graph from bare ordered pairs (one synthetic tx per pair).

        Convenience for demos and tests; duplicate pairs collapse into one
        link with accumulated count and volume.
        """
        links: dict[tuple[str, str], LinkRecord] = {}
        for i, (source, target) in enumerate(edges):
            record = LinkRecord((f"e{i:06d}",), 1, amount)
            key = (str(source), str(target))
            links[key] = links[key].merged(record) if key in links else record
        return cls(links)

    def __repr__(self) -> str:
        return (f"LedgerGraph(nodes={self.node_count}, links={self.link_count}, "
                f"tx={self.tx_count}, volume={self.volume})")


def aggregate(transactions: Sequence[Transaction]) -> tuple[LedgerGraph, AggregateDiagnostics]:
    """Aggregate filtered, time-sorted transactions into a LedgerGraph.

    Self-transfers (source == target) are dropped and counted; an empty
    input yields an empty graph.
    """
    buckets: dict[tuple[str, str], list[Transaction]] = {}
    dropped = 0
    for tx in transactions:
        if tx.source == tx.target:
            dropped += 1
            continue
        buckets.setdefault((tx.source, tx.target), []).append(tx)
    links = {
        pair: LinkRecord(
            tuple(t.tx_id for t in txs),
            len(txs),
            dsum(t.amount for t in txs),
        )
        for pair, txs in buckets.items()
    }
    return LedgerGraph(links), AggregateDiagnostics(self_transfers_dropped=dropped)
