"""Brute-force reference answers, independent of the solver machinery.

Everything here works straight from definitions: ordered tuple scans,
exhaustive assignments, and bitmask dynamic programs.  Tests compare the
fast paths against these; nothing below shares helpers with the engine.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .engine import PartitionInstance
from .graphcore import Graph

__all__ = [
    "brute_chromatic",
    "brute_count_pm",
    "brute_domatic",
    "brute_hamcycle",
    "brute_list_coloring",
    "brute_partition",
    "brute_tsp",
]

GROUND_LIMIT = 14
TOTAL_SET_LIMIT = 10_000
ASSIGNMENT_LIMIT = 12
BITMASK_LIMIT = 16


def brute_partition(inst: PartitionInstance) -> tuple[bool, int, int | None]:
    """Scan all ordered k-tuples of provider entries for exact tilings.

    Returns (feasible, count, min_weight); the count treats repeated
    entries of one set as distinct choices, and min_weight is None when
    nothing tiles.
    """
    if inst.structure != "partition":
        raise ValueError("brute_partition covers only partition instances")
    if inst.n > GROUND_LIMIT:
        raise ValueError(f"ground set exceeds the brute-force limit {GROUND_LIMIT}")
    entry_lists = [provider.entries() for provider in inst.providers]
    if sum(len(e) for e in entry_lists) > TOTAL_SET_LIMIT:
        raise ValueError(f"more than {TOTAL_SET_LIMIT} sets in total")
    full = frozenset(range(1, inst.n + 1))
    count = 0
    best: int | None = None

    def scan(depth: int, used: frozenset[int], spent: int):
        nonlocal count, best
        if depth == inst.k:
            if used == full:
                count += 1
                if best is None or spent < best:
                    best = spent
            return
        for members, weight in entry_lists[depth]:
            if members & used:
                continue
            scan(depth + 1, used | members, spent + weight)

    scan(0, frozenset(), 0)
    return (count > 0, count, best)


def _proper_assignment(g: Graph, choices: list[list[int]]) -> bool:
    order = sorted(g.vertices())
    colors: dict[int, int] = {}

    def place(idx: int) -> bool:
        if idx == len(order):
            return True
        v = order[idx]
        for c in choices[v - 1]:
            if all(colors.get(u) != c for u in g.adjacency[v]):
                colors[v] = c
                if place(idx + 1):
                    return True
                del colors[v]
        return False

    return place(0)


def brute_chromatic(g: Graph) -> int:
    if g.n > ASSIGNMENT_LIMIT:
        raise ValueError(f"chromatic search limited to {ASSIGNMENT_LIMIT} vertices")
    if g.n == 0:
        return 0
    for k in range(1, g.n + 1):
        if _proper_assignment(g, [list(range(1, k + 1))] * g.n):
            return k
    return g.n


def brute_list_coloring(g: Graph, lists: dict[int, frozenset[int]]) -> bool:
    if g.n > ASSIGNMENT_LIMIT:
        raise ValueError(f"list coloring limited to {ASSIGNMENT_LIMIT} vertices")
    choices = [sorted(lists[v]) for v in g.vertices()]
    if any(not c for c in choices):
        return False
    return _proper_assignment(g, choices)


def brute_domatic(g: Graph, k: int) -> bool:
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return True
    if g.n > ASSIGNMENT_LIMIT:
        raise ValueError(f"domatic search limited to {ASSIGNMENT_LIMIT} vertices")
    if g.n == 0:
        return False
    hoods = {v: g.closed_neighborhood(v) for v in g.vertices()}
    for assignment in itertools.product(range(k), repeat=g.n):
        classes = [set() for _ in range(k)]
        for v, c in zip(g.vertices(), assignment):
            classes[c].add(v)
        if all(
            all(hoods[v] & cls for v in g.vertices()) for cls in classes
        ):
            return True
    return False


def brute_hamcycle(g: Graph) -> bool:
    if g.n < 3:
        raise ValueError("need at least 3 vertices")
    if g.n > BITMASK_LIMIT:
        raise ValueError(f"cycle search limited to {BITMASK_LIMIT} vertices")
    n = g.n
    adj = [0] * n
    for u, v in g.edges:
        adj[u - 1] |= 1 << (v - 1)
        adj[v - 1] |= 1 << (u - 1)
    ends = [0] * (1 << n)
    ends[1] = 1
    for mask in range(1, 1 << n):
        if not mask & 1:
            continue
        reach = ends[mask]
        while reach:
            v = (reach & -reach).bit_length() - 1
            reach &= reach - 1
            frontier = adj[v] & ~mask
            while frontier:
                w = (frontier & -frontier).bit_length() - 1
                frontier &= frontier - 1
                ends[mask | (1 << w)] |= 1 << w
    closing = ends[(1 << n) - 1] & adj[0] & ~1
    return closing != 0


def brute_tsp(g: Graph) -> int | None:
    """Minimum tour weight by the classic bitmask recurrence, or None."""
    if g.n < 3:
        raise ValueError("need at least 3 vertices")
    if g.n > BITMASK_LIMIT:
        raise ValueError(f"tour search limited to {BITMASK_LIMIT} vertices")
    n = g.n

    def w(u: int, v: int) -> int:
        return g.edge_weight(u + 1, v + 1) if g.weights is not None else 1

    adj = [0] * n
    for u, v in g.edges:
        adj[u - 1] |= 1 << (v - 1)
        adj[v - 1] |= 1 << (u - 1)
    inf = float("inf")
    cost = [[inf] * n for _ in range(1 << n)]
    cost[1][0] = 0
    for mask in range(1, 1 << n):
        if not mask & 1:
            continue
        row = cost[mask]
        for v in range(n):
            base = row[v]
            if base == inf or not mask >> v & 1:
                continue
            frontier = adj[v] & ~mask
            while frontier:
                u = (frontier & -frontier).bit_length() - 1
                frontier &= frontier - 1
                trial = base + w(v, u)
                if trial < cost[mask | (1 << u)][u]:
                    cost[mask | (1 << u)][u] = trial
    full = (1 << n) - 1
    best = inf
    for v in range(1, n):
        if adj[0] >> v & 1 and cost[full][v] != inf:
            best = min(best, cost[full][v] + w(v, 0))
    return None if best == inf else int(best)


def brute_count_pm(g: Graph) -> int:
    if g.n % 2 != 0:
        raise ValueError("even vertex count required")
    if g.n > BITMASK_LIMIT:
        raise ValueError(f"matching count limited to {BITMASK_LIMIT} vertices")
    if g.n == 0:
        return 1
    n = g.n
    adj = [0] * n
    for u, v in g.edges:
        adj[u - 1] |= 1 << (v - 1)
        adj[v - 1] |= 1 << (u - 1)

    @lru_cache(maxsize=None)
    def ways(mask: int) -> int:
        if mask == 0:
            return 1
        v = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << v)
        total = 0
        partners = adj[v] & rest
        while partners:
            u = (partners & -partners).bit_length() - 1
            partners &= partners - 1
            total += ways(rest & ~(1 << u))
        return total

    result = ways((1 << n) - 1)
    ways.cache_clear()
    return result
