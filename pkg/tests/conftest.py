"""Shared graph builders and seeded generators for the test suite."""

import random

import pytest

from setpart.graphcore import Graph


def cycle_graph(n: int) -> Graph:
    return Graph.build(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path_graph(n: int) -> Graph:
    return Graph.build(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int, weights=None) -> Graph:
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    if weights is not None:
        return Graph.build(n, edges, {e: weights(*e) for e in edges})
    return Graph.build(n, edges)


def star_graph(leaves: int) -> Graph:
    return Graph.build(leaves + 1, [(1, i) for i in range(2, leaves + 2)])


def complete_bipartite(a: int, b: int) -> Graph:
    edges = [(u, a + v) for u in range(1, a + 1) for v in range(1, b + 1)]
    return Graph.build(a + b, edges)


def edgeless_graph(n: int) -> Graph:
    return Graph.build(n, [])


def petersen_graph() -> Graph:
    edges = [(i, i % 5 + 1) for i in range(1, 6)]
    edges += [(i + 5, (i + 1) % 5 + 6) for i in range(1, 6)]
    edges += [(i, i + 5) for i in range(1, 6)]
    return Graph.build(10, edges)


def er_graph(n: int, p: float, rng: random.Random, max_weight: int = 0) -> Graph:
    """Erdos-Renyi draw; positive max_weight attaches uniform weights."""
    edges = [
        (u, v)
        for u in range(1, n + 1)
        for v in range(u + 1, n + 1)
        if rng.random() < p
    ]
    if max_weight > 0:
        return Graph.build(n, edges, {e: rng.randint(1, max_weight) for e in edges})
    return Graph.build(n, edges)


def random_regular(n: int, d: int, rng: random.Random) -> Graph:
    """Uniform-ish d-regular graph by the pairing model with rejection."""
    if n * d % 2 != 0 or d >= n:
        raise ValueError("infeasible degree sequence")
    for _ in range(500):
        points = [v for v in range(1, n + 1) for _ in range(d)]
        rng.shuffle(points)
        edges = set()
        ok = True
        for i in range(0, len(points), 2):
            u, v = points[i], points[i + 1]
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return Graph.build(n, sorted(edges))
    raise RuntimeError("pairing model kept colliding")


def relabel_graph(g: Graph, perm: dict[int, int]) -> Graph:
    weights = None
    if g.weights is not None:
        weights = {(perm[u], perm[v]): w for (u, v), w in g.weights.items()}
    return Graph.build(g.n, [(perm[u], perm[v]) for u, v in g.edges], weights)


def graph_file_text(g: Graph) -> str:
    """Serialize in the 'p <n> <m>' / 'e <u> <v> [w]' format."""
    lines = [f"p {g.n} {len(g.edges)}"]
    for u, v in sorted(g.edges):
        if g.weights is not None:
            lines.append(f"e {u} {v} {g.weights[(u, v)]}")
        else:
            lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
