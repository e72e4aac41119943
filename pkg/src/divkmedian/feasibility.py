"""Deciding and constructing feasible center sets.

With overlapping groups even finding a feasible set is NP-hard, so
:func:`find_feasible_exact` is a budgeted branch-and-bound that can end
*inconclusive*; callers must not read that as "infeasible".  Disjoint groups
are easy (:func:`disjoint_feasible`) and admit the partition-matroid view
used by :func:`partition_matroid_independent` and :func:`complete_solution`.
"""

from __future__ import annotations

import numpy as np

from .errors import InconclusiveError, InfeasibleError, UsageError
from .instance import Instance, Solution
from .metricspace import nearest_distances

DEFAULT_NODE_BUDGET = 1_000_000


def check(inst: Instance, centers) -> bool:
    """True iff exactly ``k`` distinct centers meet every lower bound."""
    centers = set(int(f) for f in centers)
    if len(centers) != inst.k:
        return False
    if any(not 0 <= f < inst.n_facilities for f in centers):
        return False
    return bool((inst.group_counts(centers) >= np.asarray(inst.lower_bounds)).all())


def _require_disjoint(inst: Instance, what: str) -> None:
    if not inst.disjoint:
        raise UsageError(f"{what} requires pairwise disjoint groups")


def disjoint_feasible(inst: Instance) -> bool:
    _require_disjoint(inst, "disjoint_feasible")
    sizes_ok = all(s >= r for s, r in zip(inst.group_sizes, inst.lower_bounds))
    return sizes_ok and sum(inst.lower_bounds) <= inst.k <= inst.n_facilities


def find_feasible_exact(inst: Instance, node_budget: int = DEFAULT_NODE_BUDGET):
    """Depth-first branch-and-bound for a feasible center set.

    Branches on the group with the largest remaining deficit, trying its
    members in order of how many deficient groups they cover.  A node is
    pruned when the open slots cannot cover the largest single deficit, or the
    summed deficit when the deficient groups are pairwise disjoint among the
    remaining candidates.

    Returns a :class:`Solution` or ``None`` if provably infeasible; raises
    :class:`InconclusiveError` when ``node_budget`` nodes were expanded.
    """
    m, k = inst.n_facilities, inst.k
    if k > m or k < 1:
        return None
    mem = inst.membership
    need = np.asarray(inst.lower_bounds, dtype=np.int64)
    chosen: list[int] = []
    available = np.ones(m, dtype=bool)
    nodes = 0

    def fill() -> list[int]:
        taken = set(chosen)
        extra = [f for f in range(m) if f not in taken][: k - len(chosen)]
        return chosen + extra

    def search(deficit: np.ndarray) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise InconclusiveError(f"node budget {node_budget} exhausted")
        slots = k - len(chosen)
        active = deficit > 0
        if not active.any():
            return fill()
        if deficit.max() > slots:
            return None
        cand_mem = mem[active][:, available]
        if (cand_mem.sum(axis=1) < deficit[active]).any():
            return None
        if (cand_mem.sum(axis=0) <= 1).all() and deficit.sum() > slots:
            return None
        g = int(np.argmax(deficit))
        members = np.flatnonzero(mem[g] & available)
        cover = mem[active][:, members].sum(axis=0)
        order = members[np.lexsort((members, -cover))]
        excluded = []
        found = None
        for f in order:
            f = int(f)
            chosen.append(f)
            available[f] = False
            found = search(deficit - mem[:, f])
            chosen.pop()
            if found is not None:
                available[f] = True
                break
            excluded.append(f)  # later siblings may assume f stays closed
        for f in excluded:
            available[f] = True
        return found

    result = search(need.copy())
    if result is None:
        return None
    return Solution.evaluate(inst, result)


def greedy_feasible(inst: Instance):
    """Pick the facility covering most deficient groups until ``k`` are open.

    Ties go to the lowest id.  Heuristic: returns ``None`` when it fails,
    which can happen on feasible instances.
    """
    m, k = inst.n_facilities, inst.k
    if k > m or k < 1:
        return None
    mem = inst.membership.astype(np.int64)
    deficit = np.asarray(inst.lower_bounds, dtype=np.int64)
    open_ = np.zeros(m, dtype=bool)
    picked: list[int] = []
    while len(picked) < k:
        active = deficit > 0
        score = mem[active].sum(axis=0)
        score[open_] = -1
        if active.any() and score.max() <= 0:
            return None
        f = int(np.argmax(score))
        picked.append(f)
        open_[f] = True
        deficit = deficit - mem[:, f]
    if not check(inst, picked):
        return None
    return Solution.evaluate(inst, picked)


def partition_matroid_independent(inst: Instance, centers) -> bool:
    """``|S ∩ F_i| <= r_i`` for all groups (no over-representation)."""
    _require_disjoint(inst, "partition matroid independence")
    counts = inst.group_counts(set(centers)) if centers else np.zeros(inst.n_groups, int)
    return bool((counts <= np.asarray(inst.lower_bounds)).all())


def complete_solution(inst: Instance, centers) -> Solution:
    """Top up an independent set until every group holds exactly ``r_i`` centers.

    Groups are filled in index order; each filler is the group member that
    lowers the k-median cost the most (ties: lowest id).  Opening extra
    centers never raises any client's distance.
    """
    _require_disjoint(inst, "complete_solution")
    if sum(inst.lower_bounds) != inst.k:
        raise UsageError("completion requires sum of lower bounds equal to k")
    centers = set(int(f) for f in centers)
    if len(centers) > inst.k:
        raise UsageError("partial solution has more than k centers")
    if not partition_matroid_independent(inst, centers):
        raise UsageError("partial solution over-represents a group")
    ungrouped = [f for f in centers if not inst.membership[:, f].any()]
    if ungrouped:
        raise UsageError(f"facilities {ungrouped} belong to no group")
    for i, (g, r) in enumerate(zip(inst.groups, inst.lower_bounds)):
        if len(g) < r:
            raise InfeasibleError(f"group {i} has {len(g)} facilities, needs {r}")
    near = nearest_distances(inst, centers)
    for i, r in enumerate(inst.lower_bounds):
        have = sum(1 for f in centers if inst.membership[i, f])
        for _ in range(r - have):
            cand = np.array([f for f in inst.groups[i] if f not in centers], dtype=np.intp)
            totals = np.minimum(inst.rows(cand), near).sum(axis=1)
            f = int(cand[np.argmin(totals)])
            centers.add(f)
            near = np.minimum(near, inst.rows([f])[0])
    return Solution.evaluate(inst, centers)
