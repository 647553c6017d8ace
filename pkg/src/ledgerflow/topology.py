"""Exclusive topological categorisation of a ledger graph.

Every node and every link is assigned to exactly one category:

* cyclic components: strongly connected components of two or more nodes,
  labelled by their boundary traffic with acyclic components and
  single-nodes (``scc0``, ``sccTin``, ``sccTout``, ``sccTmix``);
* acyclic components: weakly connected groups of two or more non-cyclic
  nodes, labelled by their boundary traffic with cyclic components
  (``dag0``, ``dagTin``, ``dagTout``, ``dagTmix``);
* single-nodes: non-cyclic nodes whose links all attach to cyclic
  components (``in-single-node``, ``out-single-node``, ``bridge_scc``);
* boundary links that belong to no node component (``edge_dag2scc``,
  ``edge_scc2dag``, ``edge_scc2scc``).

Links internal to a component, and links between a single-node and a cyclic
component, are owned by that component; only the three boundary kinds stand
alone. The partition is complete: category node/link/tx/volume totals add
up exactly to the graph totals.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Iterable, Mapping

from .graph import LedgerGraph
from .util import dsum

__all__ = [
    "NodeCategory",
    "EdgeKind",
    "EdgeAssignment",
    "TopologyPartition",
    "CategoryRow",
    "OneTimeRow",
    "OneTimeUserTable",
    "CATEGORY_ORDER",
    "NODE_CATEGORIES",
    "EDGE_CATEGORIES",
    "strongly_connected_components",
    "categorize",
    "category_stats",
    "one_time_users",
    "verify_partition",
]


class NodeCategory(str, Enum):
    SCC_TMIX = "sccTmix"
    SCC_TIN = "sccTin"
    SCC_TOUT = "sccTout"
    SCC0 = "scc0"
    DAG_TMIX = "dagTmix"
    DAG_TIN = "dagTin"
    DAG_TOUT = "dagTout"
    DAG0 = "dag0"
    IN_SINGLE = "in-single-node"
    OUT_SINGLE = "out-single-node"
    BRIDGE_SCC = "bridge_scc"

    @property
    def is_scc(self) -> bool:
        return self.value.startswith("scc")

    @property
    def is_dag(self) -> bool:
        return self.value.startswith("dag")

    @property
    def is_single(self) -> bool:
        return not (self.is_scc or self.is_dag)


class EdgeKind(str, Enum):
    INTERNAL = "internal"                # intra-SCC or intra-DAG link
    ATTACHMENT = "attachment"            # single-node <-> SCC link
    DAG2SCC = "edge_dag2scc"
    SCC2DAG = "edge_scc2dag"
    SCC2SCC = "edge_scc2scc"


NODE_CATEGORIES: tuple[str, ...] = tuple(c.value for c in NodeCategory)
EDGE_CATEGORIES: tuple[str, ...] = (
    EdgeKind.DAG2SCC.value,
    EdgeKind.SCC2DAG.value,
    EdgeKind.SCC2SCC.value,
)

# Canonical report row order (largest empirical groups first by convention).
CATEGORY_ORDER: tuple[str, ...] = (
    "sccTmix",
    "in-single-node",
    "dagTin",
    "dag0",
    "out-single-node",
    "scc0",
    "sccTin",
    "dagTmix",
    "dagTout",
    "sccTout",
    "bridge_scc",
    "edge_dag2scc",
    "edge_scc2dag",
    "edge_scc2scc",
)


@dataclass(frozen=True)
class EdgeAssignment:
    kind: EdgeKind
    component_id: str | None  # set for INTERNAL and ATTACHMENT links


@dataclass(frozen=True)
class TopologyPartition:
    """Exclusive assignment of every node and link of one graph."""

    node_category: Mapping[str, NodeCategory]
    node_component: Mapping[str, str]
    components: Mapping[str, tuple[str, ...]]
    component_category: Mapping[str, NodeCategory]
    edge_assignment: Mapping[tuple[str, str], EdgeAssignment]

    def edge_label(self, pair: tuple[str, str]) -> str:
        """Report label of the category a link's traffic belongs to."""
        assignment = self.edge_assignment[pair]
        if assignment.component_id is not None:
            return self.component_category[assignment.component_id].value
        return assignment.kind.value


def strongly_connected_components(g: LedgerGraph) -> list[tuple[str, ...]]:
    """All SCCs (including singletons) via iterative Tarjan, deterministic."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[tuple[str, ...]] = []
    counter = 0
    adj = g.out_adj

    for root in g.nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work: list[tuple[str, Iterable[str]]] = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    members.append(w)
                    if w == v:
                        break
                out.append(tuple(sorted(members)))
    return out


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, items: Iterable[str]):
        self.parent = {item: item for item in items}

    def find(self, x: str) -> str:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Smaller id wins so roots are order-independent.
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def categorize(g: LedgerGraph) -> TopologyPartition:
    """Partition a graph into the exclusive topological categories."""
    # 1. Cyclic components: SCCs of size >= 2.
    scc_of: dict[str, str] = {}
    scc_members: dict[str, tuple[str, ...]] = {}
    for members in strongly_connected_components(g):
        if len(members) >= 2:
            cid = f"scc:{members[0]}"
            scc_members[cid] = members
            for v in members:
                scc_of[v] = cid

    # 2. Non-cyclic nodes: weak components of the induced subgraph.
    plain = [v for v in g.nodes if v not in scc_of]
    uf = _UnionFind(plain)
    for source, target in g.links:
        if source not in scc_of and target not in scc_of:
            uf.union(source, target)
    groups: dict[str, list[str]] = {}
    for v in plain:
        groups.setdefault(uf.find(v), []).append(v)

    dag_members: dict[str, tuple[str, ...]] = {}
    dag_of: dict[str, str] = {}
    singles: list[str] = []
    for members in groups.values():
        if len(members) >= 2:
            members = tuple(sorted(members))
            cid = f"dag:{members[0]}"
            dag_members[cid] = members
            for v in members:
                dag_of[v] = cid
        else:
            singles.append(members[0])

    # 3. Single-node classification. All links of a single-node attach to
    # cyclic components (anything else would have merged it into a DAG).
    single_category: dict[str, NodeCategory] = {}
    for v in sorted(singles):
        has_out = bool(g.out_adj[v])
        has_in = bool(g.in_adj[v])
        if has_out and has_in:
            single_category[v] = NodeCategory.BRIDGE_SCC
        elif has_out:
            single_category[v] = NodeCategory.IN_SINGLE
        else:
            single_category[v] = NodeCategory.OUT_SINGLE

    # 4./5. Boundary scan: one pass over all links collects, per component,
    # whether it sends to / receives from the node kinds that matter.
    dag_sends_to_cyc: set[str] = set()
    dag_receives_from_cyc: set[str] = set()
    scc_receives: set[str] = set()  # from DAG nodes or non-bridge single-nodes
    scc_sends: set[str] = set()
    for source, target in g.links:
        cs = scc_of.get(source)
        ct = scc_of.get(target)
        if cs is not None and ct is None:
            if target in dag_of:
                dag_receives_from_cyc.add(dag_of[target])
                scc_sends.add(cs)
            elif single_category[target] is not NodeCategory.BRIDGE_SCC:
                scc_sends.add(cs)
        elif cs is None and ct is not None:
            if source in dag_of:
                dag_sends_to_cyc.add(dag_of[source])
                scc_receives.add(ct)
            elif single_category[source] is not NodeCategory.BRIDGE_SCC:
                scc_receives.add(ct)

    component_category: dict[str, NodeCategory] = {}
    for cid in scc_members:
        inbound = cid in scc_receives
        outbound = cid in scc_sends
        if inbound and outbound:
            component_category[cid] = NodeCategory.SCC_TMIX
        elif inbound:
            component_category[cid] = NodeCategory.SCC_TIN
        elif outbound:
            component_category[cid] = NodeCategory.SCC_TOUT
        else:
            component_category[cid] = NodeCategory.SCC0
    for cid in dag_members:
        sends = cid in dag_sends_to_cyc
        receives = cid in dag_receives_from_cyc
        if sends and receives:
            component_category[cid] = NodeCategory.DAG_TMIX
        elif sends:
            component_category[cid] = NodeCategory.DAG_TIN
        elif receives:
            component_category[cid] = NodeCategory.DAG_TOUT
        else:
            component_category[cid] = NodeCategory.DAG0

    components: dict[str, tuple[str, ...]] = {}
    components.update(scc_members)
    components.update(dag_members)
    node_component: dict[str, str] = {}
    node_category: dict[str, NodeCategory] = {}
    for cid, members in scc_members.items():
        for v in members:
            node_component[v] = cid
            node_category[v] = component_category[cid]
    for cid, members in dag_members.items():
        for v in members:
            node_component[v] = cid
            node_category[v] = component_category[cid]
    for v, category in single_category.items():
        cid = f"node:{v}"
        components[cid] = (v,)
        component_category[cid] = category
        node_component[v] = cid
        node_category[v] = category

    # 6. Edge assignment.
    edge_assignment: dict[tuple[str, str], EdgeAssignment] = {}
    for pair in g.links:
        source, target = pair
        cs = scc_of.get(source)
        ct = scc_of.get(target)
        if cs is not None and ct is not None:
            if cs == ct:
                edge_assignment[pair] = EdgeAssignment(EdgeKind.INTERNAL, cs)
            else:
                edge_assignment[pair] = EdgeAssignment(EdgeKind.SCC2SCC, None)
        elif cs is None and ct is None:
            edge_assignment[pair] = EdgeAssignment(EdgeKind.INTERNAL, dag_of[source])
        elif cs is not None:  # SCC -> non-cyclic
            if target in single_category:
                edge_assignment[pair] = EdgeAssignment(EdgeKind.ATTACHMENT, node_component[target])
            else:
                edge_assignment[pair] = EdgeAssignment(EdgeKind.SCC2DAG, None)
        else:  # non-cyclic -> SCC
            if source in single_category:
                edge_assignment[pair] = EdgeAssignment(EdgeKind.ATTACHMENT, node_component[source])
            else:
                edge_assignment[pair] = EdgeAssignment(EdgeKind.DAG2SCC, None)

    return TopologyPartition(
        node_category=node_category,
        node_component=node_component,
        components=components,
        component_category=component_category,
        edge_assignment=edge_assignment,
    )


@dataclass(frozen=True)
class CategoryRow:
    scc_count: int
    wcc_count: int
    node_count: int
    link_count: int
    tx_count: int
    volume: Decimal


_ZERO_ROW = CategoryRow(0, 0, 0, 0, 0, Decimal(0))


def category_stats(g: LedgerGraph, partition: TopologyPartition) -> dict[str, CategoryRow]:
    """Per-category sizes: components, nodes, links, transactions, volume.

    Every category label appears in the result, zeroed when absent. The
    weakly-connected-component count of a category is taken over the
    subgraph of its owned links plus both endpoints of each, which groups
    e.g. single-nodes that attach to the same hub.
    """
    node_count: dict[str, int] = {label: 0 for label in CATEGORY_ORDER}
    for category in partition.node_category.values():
        node_count[category.value] += 1

    link_count: dict[str, int] = {label: 0 for label in CATEGORY_ORDER}
    tx_count: dict[str, int] = {label: 0 for label in CATEGORY_ORDER}
    volumes: dict[str, list[Decimal]] = {label: [] for label in CATEGORY_ORDER}
    endpoint_sets: dict[str, _UnionFind] = {label: _UnionFind([]) for label in CATEGORY_ORDER}

    for pair, record in g.links.items():
        label = partition.edge_label(pair)
        link_count[label] += 1
        tx_count[label] += record.count
        volumes[label].append(record.volume)
        uf = endpoint_sets[label]
        for v in pair:
            if v not in uf.parent:
                uf.parent[v] = v
        uf.union(pair[0], pair[1])

    scc_count: dict[str, int] = {label: 0 for label in CATEGORY_ORDER}
    for cid, category in partition.component_category.items():
        if category.is_scc:
            scc_count[category.value] += 1

    result: dict[str, CategoryRow] = {}
    for label in CATEGORY_ORDER:
        uf = endpoint_sets[label]
        wcc = len({uf.find(v) for v in uf.parent})
        result[label] = CategoryRow(
            scc_count=scc_count[label],
            wcc_count=wcc,
            node_count=node_count[label],
            link_count=link_count[label],
            tx_count=tx_count[label],
            volume=dsum(volumes[label]),
        )
    return result


@dataclass(frozen=True)
class OneTimeRow:
    one_outgoing: int
    one_incoming: int
    outgoing_volume: Decimal
    incoming_volume: Decimal


@dataclass(frozen=True)
class OneTimeUserTable:
    """One-transaction users per node category, split by direction."""

    rows: dict[str, OneTimeRow]
    total: OneTimeRow


def one_time_users(g: LedgerGraph, partition: TopologyPartition) -> OneTimeUserTable:
    """Users with exactly one transaction in the whole ledger."""
    out_tx: dict[str, int] = {v: 0 for v in g.nodes}
    in_tx: dict[str, int] = {v: 0 for v in g.nodes}
    out_vol: dict[str, Decimal] = {}
    in_vol: dict[str, Decimal] = {}
    for (source, target), record in g.links.items():
        out_tx[source] += record.count
        in_tx[target] += record.count
        out_vol[source] = out_vol.get(source, Decimal(0)) + record.volume
        in_vol[target] = in_vol.get(target, Decimal(0)) + record.volume

    cells: dict[str, dict[str, object]] = {}
    for v in g.nodes:
        total = out_tx[v] + in_tx[v]
        if total != 1:
            continue
        label = partition.node_category[v].value
        cell = cells.setdefault(
            label, {"out_n": 0, "in_n": 0, "out_v": [], "in_v": []}
        )
        if out_tx[v] == 1:
            cell["out_n"] += 1
            cell["out_v"].append(out_vol[v])
        else:
            cell["in_n"] += 1
            cell["in_v"].append(in_vol[v])

    rows: dict[str, OneTimeRow] = {}
    for label, cell in sorted(cells.items()):
        rows[label] = OneTimeRow(
            one_outgoing=cell["out_n"],
            one_incoming=cell["in_n"],
            outgoing_volume=dsum(cell["out_v"]),
            incoming_volume=dsum(cell["in_v"]),
        )
    total = OneTimeRow(
        one_outgoing=sum(r.one_outgoing for r in rows.values()),
        one_incoming=sum(r.one_incoming for r in rows.values()),
        outgoing_volume=dsum(r.outgoing_volume for r in rows.values()),
        incoming_volume=dsum(r.incoming_volume for r in rows.values()),
    )
    return OneTimeUserTable(rows=rows, total=total)


def _strongly_connected(members: tuple[str, ...], g: LedgerGraph) -> bool:
    member_set = set(members)
    for adj in (g.out_adj, g.in_adj):
        seen = {members[0]}
        frontier = [members[0]]
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w in member_set and w not in seen:
                    seen.add(w)
                    frontier.append(w)
        if seen != member_set:
            return False
    return True


def _acyclic(members: tuple[str, ...], g: LedgerGraph) -> bool:
    member_set = set(members)
    indeg = {v: 0 for v in members}
    succ: dict[str, list[str]] = {v: [] for v in members}
    for source, target in g.links:
        if source in member_set and target in member_set:
            succ[source].append(target)
            indeg[target] += 1
    queue = [v for v in members if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == len(members)


def verify_partition(g: LedgerGraph, partition: TopologyPartition) -> None:
    """Raise ValueError unless the partition satisfies its structural contract.

    Checks exclusivity and completeness of the assignments, strong
    connectivity of cyclic components, acyclicity of acyclic components,
    bridge endpoints in distinct SCCs, and the absence of DAG-DAG and
    single-node-DAG links.
    """
    if set(partition.node_category) != set(g.nodes):
        raise ValueError("node assignment does not cover the graph exactly")
    if set(partition.edge_assignment) != set(g.links):
        raise ValueError("edge assignment does not cover the graph exactly")

    member_of: dict[str, str] = {}
    for cid, members in partition.components.items():
        for v in members:
            if v in member_of:
                raise ValueError(f"node {v} in two components")
            member_of[v] = cid
    if set(member_of) != set(g.nodes):
        raise ValueError("components do not cover the graph exactly")

    for cid, members in partition.components.items():
        category = partition.component_category[cid]
        if category.is_scc:
            if len(members) < 2 or not _strongly_connected(members, g):
                raise ValueError(f"{cid} is not a strongly connected component")
        elif category.is_dag:
            if len(members) < 2 or not _acyclic(members, g):
                raise ValueError(f"{cid} is not an acyclic component")
        else:
            if len(members) != 1:
                raise ValueError(f"{cid} is a single-node component with {len(members)} nodes")

    for (source, target) in g.links:
        sc = partition.node_category[source]
        tc = partition.node_category[target]
        if sc.is_dag and tc.is_dag and partition.node_component[source] != partition.node_component[target]:
            raise ValueError(f"link {source}->{target} joins two distinct DAG components")
        if (sc.is_single and tc.is_dag) or (sc.is_dag and tc.is_single):
            raise ValueError(f"link {source}->{target} joins a single-node and a DAG")
        if sc.is_single and tc.is_single:
            raise ValueError(f"link {source}->{target} joins two single-nodes")

    for v, category in partition.node_category.items():
        if category is not NodeCategory.BRIDGE_SCC:
            continue
        in_comps = {partition.node_component[u] for u in g.in_adj[v]}
        out_comps = {partition.node_component[u] for u in g.out_adj[v]}
        if in_comps & out_comps:
            raise ValueError(f"bridge node {v} receives from and sends to the same SCC")
