"""Swap-based local search for diversity-aware k-median.

* :func:`ls0` ignores the groups (unconstrained baseline).
* :func:`ls1` only accepts single swaps that keep every lower bound.
* :func:`ls2` keeps one slot set per group plus a free pool and exchanges a
  whole tuple (one facility per slot, each coordinate may stay put).
* :func:`rb_swap` is the two-group, ``r1 + r2 = k`` special case whose
  neighbourhood is the red-blue pair swap.

All searches are best-improvement: every scan evaluates the complete
neighbourhood, and a move is accepted only if it lowers the objective by more
than ``delta * current``.  Ties go to the lexicographically first move, so a
fixed seed reproduces the whole trace.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, UsageError
from .feasibility import check, find_feasible_exact, greedy_feasible
from .instance import Instance, Solution
from .metricspace import _build, swap_delta_matrix


@dataclass
class LSConfig:
    """Knobs shared by every local-search variant.

    ``delta`` is the relative improvement threshold; ``max_iter`` defaults to
    ``10 * m * k`` scans.  ``tuple_budget`` caps the exhaustive tuple scan of
    LS-2, beyond which ``tuple_samples`` random prefixes are examined instead.
    """

    delta: float = 1e-9
    max_iter: int | None = None
    seed: int = 0
    restarts: int = 10
    threads: int = 1
    tuple_budget: int = 2_000_000
    tuple_samples: int = 2_000

    def __post_init__(self):
        if self.delta < 0:
            raise UsageError("delta must be non-negative")
        if self.max_iter is not None and self.max_iter < 1:
            raise UsageError("max_iter must be at least 1")
        if self.restarts < 1:
            raise UsageError("restarts must be at least 1")

    def iteration_cap(self, inst: Instance, k: int | None = None) -> int:
        if self.max_iter is not None:
            return self.max_iter
        return 10 * inst.n_facilities * (inst.k if k is None else k)


@dataclass
class SolveReport:
    """Outcome of one solver call.

    ``initial_cost``/``final_cost`` and ``trace`` are in the solver's own
    objective (the penalized cost for relaxed search); ``solution.cost`` is
    always the plain k-median cost.
    """

    solution: Solution
    algo: str
    initial_cost: float
    final_cost: float
    iterations: int
    swaps: int
    seed: int
    wall_time: float
    termination: str
    feasible: bool
    initial_centers: tuple[int, ...] = ()
    trace: list[float] = field(default_factory=list)
    history: list[tuple[int, ...]] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "algo": self.algo,
            "centers": list(self.solution.centers),
            "cost": self.solution.cost,
            "feasible": self.feasible,
            "iterations": self.iterations,
            "per_group_counts": list(self.solution.per_group_counts),
            "seed": self.seed,
            "seconds": self.wall_time if timing else 0.0,
        }
        if "profile" in self.extras:
            out["profile"] = list(self.extras["profile"])
        return out


def _rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng([seed, restart])


def _best_of(runs, cfg: LSConfig):
    """Run ``runs(r)`` for every restart; keep the lowest final objective."""
    t0 = time.perf_counter()
    if cfg.threads > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(runs, range(cfg.restarts)))
    else:
        reports = [runs(r) for r in range(cfg.restarts)]
    best = min(range(len(reports)), key=lambda r: (reports[r].final_cost, r))
    rep = reports[best]
    rep.extras["restarts"] = cfg.restarts
    rep.extras["best_restart"] = best
    rep.wall_time = time.perf_counter() - t0
    return rep


# -- single-swap descent -------------------------------------------------------


def _penalty(counts: np.ndarray, r: np.ndarray) -> float:
    return float((r / (counts + 1.0)).sum())


def _penalty_deltas(inst: Instance, centers, counts, r) -> np.ndarray:
    mem = inst.membership.astype(np.int64)
    out_mem = mem[:, list(centers)]
    new = counts[:, None, None] - out_mem[:, :, None] + mem[:, None, :]
    return (r[:, None, None] / (new + 1.0)).sum(axis=0) - _penalty(counts, r)


def _tight_mask(inst: Instance, centers, counts) -> np.ndarray:
    """``bad[o, i]``: swapping centers[o] for facility i breaks a lower bound."""
    tight = counts <= np.asarray(inst.lower_bounds)
    if not tight.any():
        return np.zeros((len(centers), inst.n_facilities), dtype=bool)
    mem = inst.membership[tight].astype(np.int64)
    return (mem[:, list(centers)].T @ (1 - mem)) > 0


def _descend(inst: Instance, start, cfg: LSConfig, algo: str, *, constrained=False,
             lam: float = 0.0, k: int | None = None) -> SolveReport:
    t0 = time.perf_counter()
    cache = _build(inst, start)
    r = np.asarray(inst.lower_bounds, dtype=np.float64)
    use_pen = lam > 0 and r.any()

    def objective():
        total = cache.total
        if use_pen:
            total += lam * _penalty(inst.group_counts(cache.centers).astype(float), r)
        return total

    obj = objective()
    trace, history = [obj], [cache.centers]
    cap = cfg.iteration_cap(inst, k)
    iterations = swaps = 0
    termination = "iteration_cap"
    while iterations < cap:
        iterations += 1
        centers = cache.centers
        deltas, _ = swap_delta_matrix(inst, cache)
        deltas[:, list(centers)] = np.inf
        counts = inst.group_counts(centers)
        if use_pen:
            deltas += lam * _penalty_deltas(inst, centers, counts.astype(float), r)
        if constrained:
            deltas[_tight_mask(inst, centers, counts)] = np.inf
        j = int(np.argmin(deltas))
        best = deltas.flat[j]
        threshold = -cfg.delta * abs(obj)
        if not best < threshold:
            termination = "local_optimum"
            break
        out, inc = centers[j // inst.n_facilities], j % inst.n_facilities
        cache.apply_swap(inst, out, inc)
        new_obj = objective()
        if not new_obj < obj + threshold:
            cache.apply_swap(inst, inc, out)  # rounding ate the gain
            termination = "local_optimum"
            break
        obj = new_obj
        swaps += 1
        trace.append(obj)
        history.append(cache.centers)
    sol = Solution.evaluate(inst, cache.centers)
    init_sol = Solution.evaluate(inst, history[0])
    pen = (lambda s: lam * _penalty(np.asarray(s.per_group_counts, float), r)) if use_pen \
        else (lambda s: 0.0)
    return SolveReport(
        solution=sol, algo=algo, initial_cost=init_sol.cost + pen(init_sol),
        final_cost=sol.cost + pen(sol), iterations=iterations, swaps=swaps, seed=cfg.seed,
        wall_time=time.perf_counter() - t0, termination=termination,
        feasible=check(inst, sol.centers), initial_centers=history[0], trace=trace,
        history=history)


def ls0(inst: Instance, k: int | None = None, cfg: LSConfig | None = None) -> SolveReport:
    """Unconstrained single-swap local search from random starts."""
    cfg = cfg or LSConfig()
    k = inst.k if k is None else k
    if not 1 <= k <= inst.n_facilities:
        raise UsageError(f"k={k} must lie in 1..{inst.n_facilities}")

    def run(restart):
        start = _rng(cfg.seed, restart).choice(inst.n_facilities, size=k, replace=False)
        return _descend(inst, start, cfg, "ls0", k=k)

    return _best_of(run, cfg)


def initial_feasible(inst: Instance, init=None) -> Solution:
    """Caller-provided start, else greedy, else exact search."""
    if init is not None:
        if not check(inst, init):
            raise UsageError(f"initial solution {sorted(init)} is not feasible")
        return Solution.evaluate(inst, init)
    sol = greedy_feasible(inst)
    if sol is None:
        sol = find_feasible_exact(inst)  # may raise InconclusiveError
    if sol is None:
        raise InfeasibleError("instance has no feasible solution")
    return sol


def ls1(inst: Instance, cfg: LSConfig | None = None, init=None) -> SolveReport:
    """Single-swap search restricted to feasible neighbours."""
    cfg = cfg or LSConfig()
    inst.report.raise_for_violations()
    start = initial_feasible(inst, init)
    rep = _descend(inst, start.centers, cfg, "ls1", constrained=True)
    rep.extras["restarts"] = 1
    return rep


# -- tuple swaps -----------------------------------------------------------------


def _random_slots(inst: Instance, rng: np.random.Generator) -> list[list[int]]:
    slots = []
    taken: set[int] = set()
    for g, r in zip(inst.groups, inst.lower_bounds):
        pick = rng.choice(np.asarray(g, dtype=np.intp), size=r, replace=False) if r else []
        slots.append(sorted(int(f) for f in pick))
        taken.update(slots[-1])
    free = np.array([f for f in range(inst.n_facilities) if f not in taken], dtype=np.intp)
    extra = inst.k - sum(inst.lower_bounds)
    slots.append(sorted(int(f) for f in rng.choice(free, size=extra, replace=False)))
    return slots


def _slots_from(inst: Instance, init) -> list[list[int]]:
    init = sorted(set(int(f) for f in init))
    if len(init) != inst.k:
        raise UsageError(f"initial solution must have {inst.k} centers")
    slots, used = [], set()
    for i, (g, r) in enumerate(zip(inst.groups, inst.lower_bounds)):
        members = [f for f in init if f in set(g)]
        if len(members) < r:
            raise UsageError(f"initial solution under-represents group {i}")
        slots.append(members[:r])
        used.update(members[:r])
    slots.append([f for f in init if f not in used])
    return slots


class _TupleScan:
    """Best improving tuple move from one state (exhaustive or sampled)."""

    def __init__(self, inst: Instance, slots, pools, cost: float):
        self.inst = inst
        self.slots = slots
        self.pools = pools
        self.base = cost
        self.coords = [c for c in range(len(slots)) if slots[c]]
        self.best = 0.0
        self.best_moves = None

    def _options(self, level: int, current: frozenset, cost: float):
        c = self.coords[level]
        cache = _build(self.inst, current)
        ins = np.array([f for f in self.pools[c] if f not in current], dtype=np.intp)
        outs = self.slots[c]
        if ins.size == 0:
            return outs, ins, np.empty((len(outs), 0))
        deltas, _ = swap_delta_matrix(self.inst, cache, ins)
        rows = np.searchsorted(np.asarray(cache.centers), outs)
        return outs, ins, cost + deltas[rows]

    def _consider(self, total: float, moves):
        if total - self.base < self.best:
            self.best = total - self.base
            self.best_moves = list(moves)

    def exhaustive(self, level: int = 0, current=None, cost=None, moves=()):
        current = frozenset(itertools.chain.from_iterable(self.slots)) if current is None \
            else current
        cost = self.base if cost is None else cost
        c = self.coords[level]
        outs, ins, totals = self._options(level, current, cost)
        if level == len(self.coords) - 1:
            self._consider(cost, moves)
            if totals.size:
                j = int(np.argmin(totals))
                o, f = outs[j // ins.size], int(ins[j % ins.size])
                self._consider(float(totals.flat[j]), moves + ((c, o, f),))
            return
        self.exhaustive(level + 1, current, cost, moves)
        for a, o in enumerate(outs):
            for b, f in enumerate(ins):
                self.exhaustive(level + 1, current - {o} | {int(f)}, float(totals[a, b]),
                                moves + ((c, o, int(f)),))

    def sampled(self, rng: np.random.Generator, samples: int):
        last = len(self.coords) - 1
        start = frozenset(itertools.chain.from_iterable(self.slots))
        for s in range(samples + 1):
            current, cost, moves = start, self.base, ()
            for level in range(last):
                if s == 0 or rng.random() < 0.5:
                    continue  # first sample: every prefix coordinate stays
                c = self.coords[level]
                outs, ins, totals = self._options(level, current, cost)
                if ins.size == 0:
                    continue
                a, b = int(rng.integers(len(outs))), int(rng.integers(ins.size))
                o, f = outs[a], int(ins[b])
                current, cost = current - {o} | {f}, float(totals[a, b])
                moves += ((c, o, f),)
            self._consider(cost, moves)
            outs, ins, totals = self._options(last, current, cost)
            if totals.size:
                j = int(np.argmin(totals))
                self._consider(float(totals.flat[j]),
                               moves + ((self.coords[last], outs[j // ins.size],
                                         int(ins[j % ins.size])),))

    def size(self) -> int:
        n = 1
        for c in self.coords:
            n *= 1 + len(self.slots[c]) * len(self.pools[c])
        return n


def _tuple_descent(inst: Instance, slots, cfg: LSConfig, algo: str,
                   rng: np.random.Generator) -> SolveReport:
    t0 = time.perf_counter()
    pools = [list(g) for g in inst.groups] + [list(range(inst.n_facilities))]
    centers = tuple(sorted(itertools.chain.from_iterable(slots)))
    cost = _build(inst, centers).total
    trace, history = [cost], [centers]
    cap = cfg.iteration_cap(inst)
    iterations = swaps = 0
    termination = "iteration_cap"
    sampled = False
    while iterations < cap:
        iterations += 1
        scan = _TupleScan(inst, slots, pools, cost)
        if scan.size() <= cfg.tuple_budget:
            scan.exhaustive()
        else:
            sampled = True
            scan.sampled(rng, cfg.tuple_samples)
        if scan.best_moves is None or not scan.best < -cfg.delta * abs(cost):
            termination = "local_optimum"
            break
        new_slots = [list(s) for s in slots]
        for c, o, f in scan.best_moves:
            new_slots[c][new_slots[c].index(o)] = f
        new_slots = [sorted(s) for s in new_slots]
        new_centers = tuple(sorted(itertools.chain.from_iterable(new_slots)))
        new_cost = _build(inst, new_centers).total
        if not new_cost < cost - cfg.delta * abs(cost):
            termination = "local_optimum"
            break
        slots, centers, cost = new_slots, new_centers, new_cost
        swaps += 1
        trace.append(cost)
        history.append(centers)
    sol = Solution.evaluate(inst, centers)
    init_sol = Solution.evaluate(inst, history[0])
    rep = SolveReport(
        solution=sol, algo=algo, initial_cost=init_sol.cost, final_cost=sol.cost,
        iterations=iterations, swaps=swaps, seed=cfg.seed,
        wall_time=time.perf_counter() - t0, termination=termination,
        feasible=check(inst, sol.centers), initial_centers=history[0], trace=trace,
        history=history)
    rep.extras["sampled_scan"] = sampled
    return rep


def _check_disjoint_problem(inst: Instance, what: str) -> None:
    inst.report.raise_for_violations()
    if not inst.disjoint:
        raise UsageError(f"{what} is defined for disjoint groups only")
    if sum(inst.lower_bounds) > inst.k:
        raise InfeasibleError("sum of lower bounds exceeds k")


def ls2(inst: Instance, cfg: LSConfig | None = None, init=None) -> SolveReport:
    """Multi-swap search over (group slots..., free pool) tuples."""
    cfg = cfg or LSConfig()
    _check_disjoint_problem(inst, "LS-2")
    if init is not None:
        rep = _tuple_descent(inst, _slots_from(inst, init), cfg, "ls2", _rng(cfg.seed, 0))
        rep.extras["restarts"] = 1
        return rep

    def run(restart):
        rng = _rng(cfg.seed, restart)
        return _tuple_descent(inst, _random_slots(inst, rng), cfg, "ls2", rng)

    return _best_of(run, cfg)


def rb_swap(inst: Instance, cfg: LSConfig | None = None, init=None) -> SolveReport:
    """Red-blue pair-swap search for two disjoint groups with ``r1 + r2 = k``."""
    cfg = cfg or LSConfig()
    if inst.n_groups != 2:
        raise UsageError(f"red-blue search needs exactly 2 groups, got {inst.n_groups}")
    _check_disjoint_problem(inst, "red-blue search")
    if sum(inst.lower_bounds) != inst.k:
        raise UsageError("red-blue search needs r1 + r2 = k")
    if init is not None:
        rep = _tuple_descent(inst, _slots_from(inst, init), cfg, "rb", _rng(cfg.seed, 0))
        rep.extras["restarts"] = 1
        return rep

    def run(restart):
        rng = _rng(cfg.seed, restart)
        return _tuple_descent(inst, _random_slots(inst, rng), cfg, "rb", rng)

    return _best_of(run, cfg)
