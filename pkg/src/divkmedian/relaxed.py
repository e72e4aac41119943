"""Penalized objectives that trade the hard lower bounds for a cost term.

The hinge penalty charges ``λ`` per missing center and cannot tell a
balanced solution from a lopsided one with the same total deficit.  The
fractional penalty ``Σ r_i / (|S ∩ F_i| + 1)`` has diminishing returns per
group (it is supermodular), so it prefers spreading centers across groups.
The two ``check_*`` helpers expose the supermodularity argument for testing;
they compare exact rationals by cross-multiplying integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import UsageError
from .instance import Instance
from .localsearch import LSConfig, SolveReport, _best_of, _descend, _rng
from .metricspace import kmedian_cost
from .metrics import violation_fraction

LAMBDA_GRID = tuple(2.0 ** e for e in range(1, 8))


@dataclass(frozen=True)
class RelaxParams:
    lam: float = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise UsageError("penalty weight must be non-negative")


def _counts(inst: Instance, centers) -> np.ndarray:
    centers = set(centers)
    if not centers:
        return np.zeros(inst.n_groups, dtype=np.int64)
    return inst.group_counts(centers)


def cost_hinge(inst: Instance, centers, lam: float) -> float:
    deficit = np.maximum(np.asarray(inst.lower_bounds) - _counts(inst, centers), 0)
    return kmedian_cost(inst, centers) + lam * float(deficit.sum())


def penalty_frac(inst: Instance, centers) -> float:
    r = np.asarray(inst.lower_bounds, dtype=np.float64)
    return float((r / (_counts(inst, centers) + 1.0)).sum())


def penalty_frac_exact(inst: Instance, centers) -> Fraction:
    return sum((Fraction(r, int(c) + 1) for r, c in zip(inst.lower_bounds,
                                                        _counts(inst, centers))), Fraction(0))


def cost_frac(inst: Instance, centers, lam: float) -> float:
    cost = kmedian_cost(inst, centers)
    return cost if lam == 0 else cost + lam * penalty_frac(inst, centers)


def relaxed_ls(inst: Instance, lam: float, cfg: LSConfig | None = None) -> SolveReport:
    """Unconstrained single-swap descent on ``cost_frac`` from random starts."""
    RelaxParams(lam)
    cfg = cfg or LSConfig()
    if not 1 <= inst.k <= inst.n_facilities:
        raise UsageError(f"k={inst.k} must lie in 1..{inst.n_facilities}")

    def run(restart):
        start = _rng(cfg.seed, restart).choice(inst.n_facilities, size=inst.k, replace=False)
        return _descend(inst, start, cfg, "relaxed", lam=lam)

    rep = _best_of(run, cfg)
    rep.extras["lambda"] = lam
    rep.extras["violation_fraction"] = (violation_fraction(inst, rep.solution.centers)
                                        if sum(inst.lower_bounds) else 0.0)
    return rep


def check_supermodular_triple(group, r: int, a, b) -> bool:
    """``f(A∩B) + f(A∪B) >= f(A) + f(B)`` for ``f(X) = r / (|X ∩ F| + 1)``."""
    group, a, b = set(group), set(a), set(b)
    if not (a <= group and b <= group):
        raise UsageError("A and B must be subsets of the group")
    # r/p + r/q >= r/x + r/y, multiplied through by p*q*x*y
    p, q, x, y = len(a & b) + 1, len(a | b) + 1, len(a) + 1, len(b) + 1
    return r * (q + p) * x * y >= r * (y + x) * p * q


def check_supermodular_full(inst: Instance, a, b) -> bool:
    """Supermodular inequality for the full fractional penalty, in exact rationals."""
    a, b = set(a), set(b)
    return (penalty_frac_exact(inst, a & b) + penalty_frac_exact(inst, a | b)
            >= penalty_frac_exact(inst, a) + penalty_frac_exact(inst, b))


def check_cardinality_inequality(a, b) -> bool:
    """``|A ∩ B| · |A ∪ B| <= |A| · |B|``."""
    a, b = set(a), set(b)
    return len(a & b) * len(a | b) <= len(a) * len(b)
