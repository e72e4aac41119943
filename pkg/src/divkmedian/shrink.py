"""Iterative distance shrinking.

Solve plain k-median, and while some group is under-represented, scale down
the distances of every facility that belongs to a deficient group, then solve
again.  Working distances only ever shrink; the returned cost is always
measured on the original distances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .feasibility import check
from .instance import Instance, Solution
from .localsearch import LSConfig, SolveReport, ls0

POLICIES = ("uniform", "power")


@dataclass
class ShrinkConfig:
    epsilon: float = 0.1
    max_iter: int = 50
    policy: str = "power"
    inner: LSConfig = field(default_factory=lambda: LSConfig(restarts=1))

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise UsageError("epsilon must lie in (0, 1)")
        if self.max_iter < 1:
            raise UsageError("max_iter must be at least 1")
        if self.policy not in POLICIES:
            raise UsageError(f"policy must be one of {POLICIES}")


def discount(deficits, policy: str, epsilon: float) -> float:
    """Distance factor for a facility given the deficits of its groups.

    ``deficits`` holds one entry per deficient group the facility belongs
    to.  Only the number of entries matters: ``uniform`` gives ``1 - ε`` for
    any non-empty collection, ``power`` gives ``(1 - ε) ** len``.
    """
    if not 0 < epsilon < 1:
        raise UsageError("epsilon must lie in (0, 1)")
    n = len(list(deficits))
    if policy == "uniform":
        return 1.0 - epsilon if n else 1.0
    if policy == "power":
        return (1.0 - epsilon) ** n
    raise UsageError(f"unknown discount policy {policy!r}")


@dataclass
class ShrinkRound:
    index: int
    distances: np.ndarray  # working distances used in this round, facility-major
    centers: tuple[int, ...]
    deficit: np.ndarray
    factors: np.ndarray | None  # discount applied after this round, None if feasible
    iterations: int = 0
    swaps: int = 0


def shrink_rounds(inst: Instance, cfg: ShrinkConfig | None = None):
    """Yield one :class:`ShrinkRound` per k-median solve.

    Stops after the first feasible round or after ``max_iter`` rounds.  The
    yielded ``distances`` array is a private copy.
    """
    cfg = cfg or ShrinkConfig()
    if not 1 <= inst.k <= inst.n_facilities:
        raise UsageError(f"k={inst.k} must lie in 1..{inst.n_facilities}")
    work = np.array(inst.dist_t, dtype=np.float64)  # d'(f, c)
    need = np.asarray(inst.lower_bounds, dtype=np.int64)
    mem = inst.membership
    for rnd in range(cfg.max_iter):
        inner = LSConfig(**{**cfg.inner.__dict__, "seed": cfg.inner.seed + rnd})
        rep = ls0(inst.with_facility_distances(work), cfg=inner)
        centers = rep.solution.centers
        deficit = np.maximum(need - inst.group_counts(centers), 0)
        if not deficit.any():
            yield ShrinkRound(rnd, work.copy(), centers, deficit, None, rep.iterations,
                              rep.swaps)
            return
        sigma = np.array([
            discount([int(d) for d in deficit[mem[:, f]] if d > 0], cfg.policy, cfg.epsilon)
            for f in range(inst.n_facilities)])
        yield ShrinkRound(rnd, work.copy(), centers, deficit, sigma, rep.iterations, rep.swaps)
        work *= sigma[:, None]


def iterative_shrinking(inst: Instance, cfg: ShrinkConfig | None = None):
    """Returns a :class:`SolveReport` on success, ``None`` after ``max_iter`` rounds.

    ``report.extras["rounds"]`` counts the k-median solves and
    ``report.extras["factors"]`` lists the discount vector of every
    unsuccessful round.
    """
    cfg = cfg or ShrinkConfig()
    t0 = time.perf_counter()
    factors, iterations = [], 0
    for rnd in shrink_rounds(inst, cfg):
        iterations += rnd.iterations
        if rnd.factors is not None:
            factors.append(rnd.factors)
            continue
        sol = Solution.evaluate(inst, rnd.centers)
        return SolveReport(
            solution=sol, algo="shrink", initial_cost=sol.cost, final_cost=sol.cost,
            iterations=iterations, swaps=rnd.swaps, seed=cfg.inner.seed,
            wall_time=time.perf_counter() - t0, termination="feasible",
            feasible=check(inst, sol.centers), initial_centers=sol.centers,
            trace=[sol.cost], history=[sol.centers],
            extras={"rounds": rnd.index + 1, "factors": factors, "policy": cfg.policy,
                    "epsilon": cfg.epsilon})
    return None
