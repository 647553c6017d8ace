import random

from ledgerflow.graph import LedgerGraph


def random_digraph(rng: random.Random, max_nodes: int, density: float | None = None) -> LedgerGraph:
    """Random simple digraph; nodes are exactly the link endpoints."""
    n = rng.randint(2, max_nodes)
    if density is None:
        density = rng.choice([0.5, 1.0, 2.0, 3.0])
    m = max(1, int(n * density))
    pairs = set()
    for _ in range(m * 10):
        if len(pairs) >= m:
            break
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            pairs.add((f"n{a:03d}", f"n{b:03d}"))
    return LedgerGraph.from_edges(sorted(pairs))
