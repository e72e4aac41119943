"""Brute-force ground truth: k-subset enumeration, dominating set, vertex cover."""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from . import _backend
from .errors import OracleRefusal
from .instance import Graph, Instance, Solution

DEFAULT_CAP = 10_000_000
GRAPH_CAP = 16


def _combo_blocks(m: int, k: int, block: int):
    it = combinations(range(m), k)
    while True:
        chunk = np.fromiter((f for c in _take(it, block) for f in c), dtype=np.intp)
        if chunk.size == 0:
            return
        yield chunk.reshape(-1, k)


def _take(it, n):
    for _, x in zip(range(n), it):
        yield x


def exact_solve(inst: Instance, cap: int = DEFAULT_CAP, equality: bool = False,
                block: int = 8192):
    """Cheapest feasible k-subset by enumerating all ``C(m, k)`` of them.

    Subsets are visited in lexicographic order and a strictly smaller cost is
    needed to replace the incumbent, so ties resolve to the lexicographically
    smallest set.  With ``equality=True`` the counts must equal the lower
    bounds exactly.  Returns ``(Solution, cost)`` or ``None``.
    """
    m, k = inst.n_facilities, inst.k
    if not 1 <= k <= m:
        return None
    count = comb(m, k)
    if count > cap:
        raise OracleRefusal(f"C({m},{k}) = {count} subsets exceeds the cap {cap}", count)
    mem = inst.membership.astype(np.int64)
    r = np.asarray(inst.lower_bounds, dtype=np.int64)
    dist_t = inst.dist_t
    best_cost, best_set = np.inf, None
    for combos in _combo_blocks(m, k, block):
        counts = mem[:, combos].sum(axis=2)  # (t, B)
        ok = (counts == r[:, None]) if equality else (counts >= r[:, None])
        ok = ok.all(axis=0) if len(r) else np.ones(len(combos), dtype=bool)
        if not ok.any():
            continue
        feas = np.ascontiguousarray(combos[ok])
        costs = _backend.subset_costs(dist_t, feas)
        j = int(np.argmin(costs))
        if costs[j] < best_cost:
            best_cost, best_set = float(costs[j]), feas[j]
    if best_set is None:
        return None
    sol = Solution.evaluate(inst, best_set.tolist())
    return sol, sol.cost


def _check_graph(g: Graph) -> None:
    if g.n > GRAPH_CAP:
        raise OracleRefusal(f"graph has {g.n} vertices; exhaustive search is capped at "
                            f"{GRAPH_CAP}", 2 ** g.n)


def exact_domset(g: Graph, k: int):
    """Smallest dominating set of size ``<= k`` (lexicographically first), or ``None``."""
    _check_graph(g)
    closed = [(1 << u) | sum(1 << v for v in g.adj[u]) for u in range(g.n)]
    full = (1 << g.n) - 1
    for size in range(0, min(k, g.n) + 1):
        for cand in combinations(range(g.n), size):
            covered = 0
            for u in cand:
                covered |= closed[u]
            if covered == full:
                return set(cand)
    return None


def exact_vertexcover(g: Graph, k: int):
    """Smallest vertex cover of size ``<= k`` (lexicographically first), or ``None``."""
    _check_graph(g)
    edges = g.edges
    for size in range(0, min(k, g.n) + 1):
        for cand in combinations(range(g.n), size):
            s = set(cand)
            if all(u in s or v in s for u, v in edges):
                return s
    return None
