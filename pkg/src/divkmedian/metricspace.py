"""k-median objective and the incremental swap machinery.

A :class:`CostCache` keeps, for every client, its nearest and second-nearest
open center.  With it the cost change of replacing one center by a closed
facility is an O(n) computation, and a whole row of candidates is evaluated
by the compiled ``swap_deltas`` kernel.

Ties between equidistant centers go to the lowest facility id, so caches and
every solver built on them are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import StaleCacheError, UsageError
from .instance import Instance


def _as_centers(inst: Instance, centers) -> np.ndarray:
    idx = np.array(sorted({int(f) for f in centers}), dtype=np.intp)
    if idx.size and (idx[0] < 0 or idx[-1] >= inst.n_facilities):
        raise UsageError(f"facility ids out of range 0..{inst.n_facilities - 1}")
    return idx


def kmedian_cost(inst: Instance, centers) -> float:
    """Sum over clients of the distance to the closest center."""
    idx = _as_centers(inst, centers)
    if idx.size == 0:
        raise UsageError("k-median cost of an empty center set is undefined")
    # same kernel as the exhaustive oracle so the two never disagree on the objective
    rows = inst.rows(idx)
    return float(_backend.subset_costs(rows, np.arange(idx.size, dtype=np.intp)[None, :])[0])


def nearest_distances(inst: Instance, centers) -> np.ndarray:
    """Per-client distance to the closest center (``inf`` for an empty set)."""
    idx = _as_centers(inst, centers)
    if idx.size == 0:
        return np.full(inst.n_clients, np.inf)
    return inst.rows(idx).min(axis=0)


@dataclass
class CostCache:
    """Nearest/second-nearest bookkeeping for one center set.

    ``near[c]`` and ``second[c]`` are facility ids (``second`` is -1 when only
    one center is open), ``d1``/``d2`` their distances.  ``version`` grows on
    every :meth:`apply_swap`.
    """

    centers: tuple[int, ...]
    near: np.ndarray
    d1: np.ndarray
    second: np.ndarray
    d2: np.ndarray
    total: float
    version: int = 0

    @property
    def slot(self) -> np.ndarray:
        """Position of each client's nearest center within ``centers``."""
        return np.searchsorted(np.asarray(self.centers), self.near).astype(np.intp)

    def apply_swap(self, inst: Instance, out: int, inc: int) -> None:
        """Replace ``out`` by ``inc`` in place, touching only affected clients."""
        if out not in self.centers or inc in self.centers:
            raise UsageError(f"invalid swap {out} -> {inc} for centers {self.centers}")
        centers = tuple(sorted((set(self.centers) - {out}) | {inc}))
        x = inst.rows([inc])[0]
        hit = (self.near == out) | (self.second == out)
        if hit.any():
            sub = np.asarray(centers, dtype=np.intp)
            rows = inst.rows(sub)[:, hit]
            near, d1, second, d2 = _backend.nearest_two(np.ascontiguousarray(rows))
            self.near[hit] = sub[near]
            self.d1[hit] = d1
            self.second[hit] = np.where(second >= 0, sub[np.maximum(second, 0)], -1)
            self.d2[hit] = d2
        rest = ~hit
        # strict or tie-with-lower-id improvements of the nearest center
        beats1 = rest & ((x < self.d1) | ((x == self.d1) & (inc < self.near)))
        beats2 = rest & ~beats1 & ((x < self.d2) | ((x == self.d2) & (inc < self.second)))
        self.second[beats1] = self.near[beats1]
        self.d2[beats1] = self.d1[beats1]
        self.near[beats1] = inc
        self.d1[beats1] = x[beats1]
        self.second[beats2] = inc
        self.d2[beats2] = x[beats2]
        self.centers = centers
        self.total = float(self.d1.sum())
        self.version += 1


def _build(inst: Instance, centers) -> CostCache:
    idx = _as_centers(inst, centers)
    if idx.size == 0:
        raise UsageError("cannot build a cache for an empty center set")
    near, d1, second, d2 = _backend.nearest_two(inst.rows(idx))
    second_ids = np.where(second >= 0, idx[np.maximum(second, 0)], -1)
    return CostCache(tuple(int(f) for f in idx), idx[near].astype(np.intp), d1,
                     second_ids.astype(np.intp), d2, float(d1.sum()))


def build_cache(inst: Instance, centers) -> CostCache:
    """Cache for ``centers``; at least two centers are needed for a second-nearest."""
    if len(set(centers)) < 2:
        raise UsageError("build_cache needs at least two centers")
    return _build(inst, centers)


def swap_delta(inst: Instance, cache: CostCache, out: int, inc: int,
               version: int | None = None) -> float:
    """``cost(S - out + inc) - cost(S)`` in O(n) from the cache."""
    if version is not None and version != cache.version:
        raise StaleCacheError(f"cache version {cache.version} != expected {version}")
    if out not in cache.centers:
        raise StaleCacheError(f"{out} is not an open center of this cache")
    if inc in cache.centers:
        raise UsageError(f"{inc} is already open")
    x = inst.rows([inc])[0]
    base = np.where(cache.near == out, cache.d2, cache.d1)
    return float((np.minimum(x, base) - cache.d1).sum())


def swap_delta_matrix(inst: Instance, cache: CostCache, candidates=None,
                      block: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Deltas for every (open center, candidate) pair.

    Returns ``(deltas, candidates)`` where ``deltas[i, j]`` is the change for
    swapping ``cache.centers[i]`` out and ``candidates[j]`` in.  Entries for
    candidates that are already open are meaningless and should be masked.
    """
    cand = (np.arange(inst.n_facilities, dtype=np.intp) if candidates is None
            else np.asarray(candidates, dtype=np.intp))
    k = len(cache.centers)
    slot = cache.slot
    out = np.empty((k, cand.size))
    for lo in range(0, cand.size, block):
        sub = cand[lo:lo + block]
        out[:, lo:lo + sub.size] = _backend.swap_deltas(inst.rows(sub), cache.d1, cache.d2,
                                                        slot, k)
    return out, cand
