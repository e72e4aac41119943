"""Slack budgets (``Σ r_i < k``) on disjoint groups.

Every way of distributing the ``k - Σ r_i`` spare centers over the groups
gives a profile ``r'`` with ``Σ r'_i = k``; solving each profile as an
equality instance and keeping the cheapest result loses nothing against the
inequality-constrained problem.  There are ``C(k - Σr + t - 1, t - 1)``
profiles (``k - r1 - r2 + 1`` for two groups), fewer once group sizes cap them.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InconclusiveError, InfeasibleError, UsageError
from .feasibility import check
from .instance import Instance, Solution
from .localsearch import LSConfig, SolveReport, ls1, rb_swap


@dataclass(frozen=True)
class ConstraintProfile:
    bounds: tuple[int, ...]

    def __iter__(self):
        return iter(self.bounds)


def enumerate_profiles(lower_bounds: Sequence[int], group_sizes: Sequence[int] | None,
                       k: int) -> list[ConstraintProfile]:
    """All ``r' >= R`` with ``Σ r' = k`` and ``r'_i <= |F_i|``, in lexicographic order.

    ``group_sizes=None`` means unbounded groups.
    """
    lbs = [int(r) for r in lower_bounds]
    spare = k - sum(lbs)
    if spare < 0:
        raise InfeasibleError(f"lower bounds sum to {sum(lbs)} > k={k}")
    t = len(lbs)
    caps = [None] * t if group_sizes is None else list(group_sizes)
    out: list[ConstraintProfile] = []

    def rec(i: int, left: int, acc: list[int]):
        if i == t - 1:
            val = lbs[i] + left
            if caps[i] is None or val <= caps[i]:
                out.append(ConstraintProfile(tuple(acc + [val])))
            return
        for extra in range(left + 1):
            val = lbs[i] + extra
            if caps[i] is not None and val > caps[i]:
                break
            rec(i + 1, left - extra, acc + [val])

    if t == 0:
        return out
    rec(0, spare, [])
    return out


def _with_residual_group(inst: Instance) -> Instance:
    """Add a zero-demand group for facilities outside every group, if any."""
    covered = inst.membership.any(axis=0)
    if covered.all():
        return inst
    rest = [f for f in range(inst.n_facilities) if not covered[f]]
    return inst.replace(groups=list(inst.groups) + [rest],
                        lower_bounds=list(inst.lower_bounds) + [0])


def default_solver(inst: Instance) -> Callable[[Instance, LSConfig], SolveReport]:
    if inst.n_groups == 2:
        return lambda sub, cfg: rb_swap(sub, cfg)
    return lambda sub, cfg: ls1(sub, cfg)


def solve_with_completion(inst: Instance, solver=None, cfg: LSConfig | None = None,
                          threads: int = 1) -> SolveReport:
    """Solve every constraint profile and return the cheapest report.

    ``solver(sub_instance, cfg)`` receives an instance whose lower bounds sum
    to ``k``.  Facilities belonging to no group are treated as one extra
    zero-demand group, so the profiles cover every feasible solution.  Ties
    between profiles go to the lexicographically smaller profile.
    """
    cfg = cfg or LSConfig()
    if not inst.disjoint:
        raise UsageError("profile completion requires disjoint groups")
    work = _with_residual_group(inst)
    solver = solver or default_solver(work)
    profiles = enumerate_profiles(work.lower_bounds, work.group_sizes, work.k)
    t0 = time.perf_counter()

    def run(profile):
        sub = work.replace(lower_bounds=profile.bounds)
        try:
            return solver(sub, cfg)
        except (InfeasibleError, InconclusiveError):
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(run, profiles))
    else:
        reports = [run(p) for p in profiles]
    done = [(rep.solution.cost, p.bounds, rep) for p, rep in zip(profiles, reports)
            if rep is not None]
    if not done:
        raise InfeasibleError("no constraint profile admits a solution")
    cost, bounds, best = min(done, key=lambda x: (x[0], x[1]))
    best.solution = Solution.evaluate(inst, best.solution.centers)
    best.feasible = check(inst, best.solution.centers)
    best.extras["profile"] = list(bounds[: inst.n_groups])
    best.extras["profiles"] = len(profiles)
    best.wall_time = time.perf_counter() - t0
    return best
