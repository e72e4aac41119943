"""Quality and fairness metrics for comparing solutions."""

from __future__ import annotations

import numpy as np

from .errors import UndefinedMetricError, UsageError
from .instance import Instance


def pod(cost_alg: float, cost_base: float) -> float:
    """Price of diversity: relative cost increase over the unconstrained baseline."""
    if cost_base == 0:
        raise UndefinedMetricError("price of diversity undefined for a zero-cost baseline")
    return (cost_alg - cost_base) / cost_base


def l1_representation(counts_alg, counts_base, k: int, t: int | None = None) -> float:
    """Normalized L1 distance between two per-group center counts."""
    a = np.asarray(counts_alg, dtype=np.float64)
    b = np.asarray(counts_base, dtype=np.float64)
    t = len(a) if t is None else t
    if a.shape != b.shape or len(a) != t:
        raise UsageError(f"count vectors must both have length t={t}")
    return float(np.abs(a - b).sum() / (k * t))


def violation_fraction(inst: Instance, centers) -> float:
    """Total unmet lower-bound demand divided by the total demand."""
    r = np.asarray(inst.lower_bounds, dtype=np.int64)
    total = int(r.sum())
    if total == 0:
        raise UndefinedMetricError("violation fraction undefined when all lower bounds are 0")
    counts = inst.group_counts(set(centers)) if len(centers) else np.zeros_like(r)
    return float(np.maximum(r - counts, 0).sum() / total)
