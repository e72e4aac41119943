"""Problem data: instances, graphs, solutions, file formats and generators.

An :class:`Instance` bundles clients, facilities, the facility groups
``F_1..F_t`` with their lower bounds ``r_1..r_t``, the budget ``k`` and a
distance source.  Distances are stored facility-major (``dist_t[f, c]``)
because every hot loop walks one facility's distances to all clients.

>>> inst = fig2_counterexample(10.0)
>>> inst.k, inst.n_groups, inst.disjoint
(2, 4, False)
>>> validate(inst).sum_class
'>k'
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import SchemaError, UsageError

log = logging.getLogger(__name__)

#: Above this many client-facility pairs, point instances compute distance
#: rows on demand instead of materializing the full matrix.
MATERIALIZE_LIMIT = 25_000_000

_METRICS = {"l1": "cityblock", "l2": "euclidean"}


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    adj: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise UsageError("adjacency length does not match vertex count")
        for u, nbrs in enumerate(self.adj):
            if u in nbrs:
                raise UsageError(f"self-loop at vertex {u}")
            for v in nbrs:
                if not 0 <= v < self.n or u not in self.adj[v]:
                    raise UsageError(f"asymmetric or invalid edge ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise UsageError(f"self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(frozenset(a) for a in adj))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> Graph:
        try:
            return cls.from_edges(int(data["n"]), data.get("edges", []))
        except KeyError as exc:
            raise SchemaError(f"graph JSON missing field {exc}") from None


class Instance:
    """A diversity-aware k-median instance.

    Parameters
    ----------
    groups : sequence of facility-id collections
        The groups ``F_1..F_t``; they may overlap.
    lower_bounds : sequence of int
        ``r_i`` per group.
    k : int
        Number of centers to open.
    matrix : array (n_clients, n_facilities), optional
        Explicit distances.  Mutually exclusive with the point arguments.
    client_points, facility_points : arrays, optional
        Coordinates; distances come from ``metric`` ("l1" or "l2").

    Structural mismatches raise immediately; semantic problems (negative
    distances, undersized groups, ``k > m``) are reported by :func:`validate`.
    """

    def __init__(self, groups, lower_bounds, k, matrix=None, client_points=None,
                 facility_points=None, metric="l1"):
        self.groups = tuple(tuple(sorted({int(f) for f in g})) for g in groups)
        self.lower_bounds = tuple(int(r) for r in lower_bounds)
        self.k = int(k)
        if len(self.lower_bounds) != len(self.groups):
            raise UsageError("one lower bound per group is required")
        if (matrix is None) == (client_points is None):
            raise UsageError("give either a distance matrix or client/facility points")
        if matrix is not None:
            mat = np.array(matrix, dtype=np.float64)
            if mat.ndim != 2:
                raise UsageError("distance matrix must be 2-D")
            self._dist_t = np.ascontiguousarray(mat.T)
            self._dist_t.setflags(write=False)
            self.n_clients, self.n_facilities = mat.shape
            self.client_points = self.facility_points = None
            self.metric = None
        else:
            if metric not in _METRICS:
                raise UsageError(f"unknown metric {metric!r}")
            cp = np.atleast_2d(np.asarray(client_points, dtype=np.float64))
            fp = cp if facility_points is None else np.atleast_2d(
                np.asarray(facility_points, dtype=np.float64))
            if cp.shape[1] != fp.shape[1]:
                raise UsageError("client and facility points differ in dimension")
            self.client_points, self.facility_points = cp, fp
            self.metric = metric
            self.n_clients, self.n_facilities = len(cp), len(fp)
            self._dist_t = None

    # -- distances -----------------------------------------------------------

    @property
    def materialized(self) -> bool:
        return self._dist_t is not None or (
            self.n_clients * self.n_facilities <= MATERIALIZE_LIMIT)

    @cached_property
    def dist_t(self) -> np.ndarray:
        """Facility-major distance matrix, shape ``(m, n)``."""
        if self._dist_t is not None:
            return self._dist_t
        d = np.ascontiguousarray(cdist(self.facility_points, self.client_points,
                                       _METRICS[self.metric]))
        d.setflags(write=False)
        return d

    @property
    def dist(self) -> np.ndarray:
        """Client-major view ``d[c, f]``."""
        return self.dist_t.T

    def rows(self, facilities) -> np.ndarray:
        """Distances from each listed facility to all clients, C-contiguous."""
        idx = np.asarray(facilities, dtype=np.intp)
        if self.materialized:
            return np.ascontiguousarray(self.dist_t[idx])
        return np.ascontiguousarray(cdist(self.facility_points[idx], self.client_points,
                                          _METRICS[self.metric]))

    # -- groups --------------------------------------------------------------

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @cached_property
    def membership(self) -> np.ndarray:
        """Boolean ``(t, m)`` incidence matrix; out-of-range ids are ignored."""
        mem = np.zeros((self.n_groups, self.n_facilities), dtype=bool)
        for i, g in enumerate(self.groups):
            ids = [f for f in g if 0 <= f < self.n_facilities]
            mem[i, ids] = True
        mem.setflags(write=False)
        return mem

    @cached_property
    def disjoint(self) -> bool:
        return bool((self.membership.sum(axis=0) <= 1).all())

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self.membership.sum(axis=1))

    def group_counts(self, centers) -> np.ndarray:
        """``|S ∩ F_i|`` for every group."""
        idx = np.fromiter(centers, dtype=np.intp)
        return self.membership[:, idx].sum(axis=1).astype(np.int64)

    # -- derived instances ---------------------------------------------------

    def replace(self, *, groups=None, lower_bounds=None, k=None, matrix=None) -> Instance:
        """Copy with some fields swapped.  ``matrix`` is client-major."""
        groups = self.groups if groups is None else groups
        lower_bounds = self.lower_bounds if lower_bounds is None else lower_bounds
        k = self.k if k is None else k
        if matrix is not None:
            return Instance(groups, lower_bounds, k, matrix=matrix)
        if self._dist_t is not None:
            return Instance(groups, lower_bounds, k, matrix=self._dist_t.T)
        return Instance(groups, lower_bounds, k, client_points=self.client_points,
                        facility_points=self.facility_points, metric=self.metric)

    def with_facility_distances(self, dist_t) -> Instance:
        """Copy using a facility-major matrix ``dist_t``."""
        return Instance(self.groups, self.lower_bounds, self.k, matrix=np.asarray(dist_t).T)

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        if self._dist_t is not None:
            dist = {"matrix": self._dist_t.T.tolist()}
        else:
            fac = None if self.facility_points is self.client_points else self.facility_points
            dist = {"points": {
                "clients": self.client_points.tolist(),
                "facilities": (self.client_points if fac is None else fac).tolist(),
                "metric": self.metric,
            }}
        return {
            "n_clients": self.n_clients,
            "n_facilities": self.n_facilities,
            "k": self.k,
            "groups": [list(g) for g in self.groups],
            "lower_bounds": list(self.lower_bounds),
            "distances": dist,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Instance:
        try:
            groups, lbs, k, dist = data["groups"], data["lower_bounds"], data["k"], data["distances"]
        except KeyError as exc:
            raise SchemaError(f"instance JSON missing field {exc}") from None
        if "matrix" in dist:
            inst = cls(groups, lbs, k, matrix=dist["matrix"])
        elif "points" in dist:
            pts = dist["points"]
            try:
                inst = cls(groups, lbs, k, client_points=pts["clients"],
                           facility_points=pts["facilities"], metric=pts.get("metric", "l1"))
            except KeyError as exc:
                raise SchemaError(f"points distance source missing field {exc}") from None
        else:
            raise SchemaError("distances must contain 'matrix' or 'points'")
        for key, have in (("n_clients", inst.n_clients), ("n_facilities", inst.n_facilities)):
            if key in data and int(data[key]) != have:
                raise SchemaError(f"{key}={data[key]} disagrees with distance source ({have})")
        return inst

    def __repr__(self):
        return (f"Instance(n={self.n_clients}, m={self.n_facilities}, k={self.k}, "
                f"t={self.n_groups}, R={list(self.lower_bounds)})")


def load_instance(path) -> Instance:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return Instance.from_dict(data)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict()) + "\n")


@dataclass(frozen=True)
class Solution:
    """A center set with its per-group counts and k-median cost."""

    centers: tuple[int, ...]
    per_group_counts: tuple[int, ...]
    cost: float

    @property
    def size(self) -> int:
        return len(self.centers)

    @classmethod
    def evaluate(cls, inst: Instance, centers) -> Solution:
        from .metricspace import kmedian_cost

        centers = tuple(sorted(int(f) for f in centers))
        return cls(centers, tuple(int(c) for c in inst.group_counts(centers)),
                   kmedian_cost(inst, centers))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    disjoint: bool = True
    sum_class: str = "=k"

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_for_violations(self) -> None:
        if self.violations:
            raise UsageError("invalid instance: " + "; ".join(self.violations))


def validate(inst: Instance) -> ValidationReport:
    """Check instance invariants; findings are collected, never raised."""
    rep = ValidationReport()
    m = inst.n_facilities
    if inst.k < 1:
        rep.violations.append(f"k={inst.k} must be positive")
    if inst.k > m:
        rep.violations.append(f"k={inst.k} exceeds facility count {m}")
    for i, (g, r) in enumerate(zip(inst.groups, inst.lower_bounds)):
        bad = [f for f in g if not 0 <= f < m]
        if bad:
            rep.violations.append(f"group {i} has invalid facility ids {bad}")
        if r < 0:
            rep.violations.append(f"group {i} has negative lower bound {r}")
        if not g:
            rep.warnings.append(f"group {i} is empty")
        if r > len(g):
            rep.violations.append(f"group {i} undersized: |F_{i}|={len(g)} < r_{i}={r}")
    if inst._dist_t is not None:
        d = inst._dist_t
        if not np.isfinite(d).all() or (d < 0).any():
            rep.violations.append("invalid distance: entries must be finite and non-negative")
    else:
        for name, pts in (("client", inst.client_points), ("facility", inst.facility_points)):
            if not np.isfinite(pts).all():
                rep.violations.append(f"invalid distance: non-finite {name} coordinates")
    rep.disjoint = inst.disjoint
    total = sum(inst.lower_bounds)
    rep.sum_class = "=k" if total == inst.k else ("<k" if total < inst.k else ">k")
    return rep


# -- generators --------------------------------------------------------------


def from_domset(g: Graph, k: int) -> Instance:
    """Feasibility instance whose feasible sets are the dominating sets of ``g``.

    Each vertex ``u`` yields the group ``{u} ∪ N(u)`` with lower bound 1, and
    all distances are 1.
    """
    if g.n < 1:
        raise UsageError("graph must be non-empty")
    groups = [sorted({u} | g.adj[u]) for u in range(g.n)]
    return Instance(groups, [1] * g.n, k, matrix=np.ones((g.n, g.n)))


def from_vertexcover(g: Graph, k: int) -> Instance:
    """One size-2 group per edge; feasible sets are the vertex covers."""
    edges = g.edges
    if g.n < 1 or not edges:
        raise UsageError("graph must have at least one edge")
    return Instance([list(e) for e in edges], [1] * len(edges), k, matrix=np.ones((g.n, g.n)))


def fig2_counterexample(c: float) -> Instance:
    """Two clients, four facilities where single-swap search gets stuck.

    Facilities 0 and 1 are at distance ``c`` from both clients, facilities 2
    and 3 at distance 1.  Groups (red, green, blue, yellow) are
    ``{0,2}, {1,3}, {0,3}, {1,2}``, each needing one center, and ``k = 2``.
    """
    if not c > 1:
        raise UsageError(f"c must exceed 1, got {c}")
    row = [c, c, 1.0, 1.0]
    groups = [[0, 2], [1, 3], [0, 3], [1, 2]]
    return Instance(groups, [1, 1, 1, 1], 2, matrix=[row, row])


def random_metric(n, t, k, lower_bounds=None, overlap=0.0, seed=0, dim=2,
                  n_facilities=None, max_retries=100) -> Instance:
    """Uniform points in the unit cube with random (possibly overlapping) groups.

    Every facility gets a uniformly drawn base group and then joins each other
    group independently with probability ``overlap``.  Clients and facilities
    coincide unless ``n_facilities`` is given.  Draws whose group sizes cannot
    meet ``lower_bounds`` are regenerated.
    """
    if n < 1 or t < 1 or k < 1:
        raise UsageError("n, t and k must be positive")
    m = n if n_facilities is None else n_facilities
    if k > m:
        raise UsageError(f"k={k} exceeds facility count {m}")
    lbs = [0] * t if lower_bounds is None else [int(r) for r in lower_bounds]
    if len(lbs) != t:
        raise UsageError("lower_bounds must have length t")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        clients = rng.random((n, dim))
        facilities = clients if n_facilities is None else rng.random((m, dim))
        base = rng.integers(0, t, size=m)
        mem = np.zeros((t, m), dtype=bool)
        mem[base, np.arange(m)] = True
        if overlap > 0:
            mem |= rng.random((t, m)) < overlap
        sizes = mem.sum(axis=1)
        if (sizes >= lbs).all():
            groups = [np.flatnonzero(row).tolist() for row in mem]
            return Instance(groups, lbs, k, client_points=clients,
                            facility_points=None if n_facilities is None else facilities,
                            metric="l1")
    raise UsageError(f"could not draw groups meeting lower bounds in {max_retries} attempts")


def load_csv(path, protected: Sequence[str], features: Sequence[str] | None = None,
             group_mode: str = "disjoint", k: int | None = None,
             lower_bounds: Sequence[int] | None = None) -> Instance:
    """Build an instance from a CSV table; every row is a client and a facility.

    Feature columns are scaled to unit L2 norm and compared with the L1
    metric.  Groups come from the ``protected`` columns: in ``"disjoint"``
    mode the first protected column partitions the rows by value, in
    ``"intersect"`` mode each (column, value) pair forms its own group.
    """
    if group_mode not in ("disjoint", "intersect"):
        raise UsageError(f"unknown group mode {group_mode!r}")
    if not protected:
        raise SchemaError("at least one protected column is required")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    missing = [c for c in list(protected) + list(features or []) if c not in header]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    if features is None:
        features = [c for c in header if c not in protected]
    if not features:
        raise SchemaError("no feature columns")
    if not rows:
        raise SchemaError("CSV has no data rows")

    data = np.empty((len(rows), len(features)))
    for i, row in enumerate(rows):
        for j, col in enumerate(features):
            try:
                data[i, j] = float(row[col])
            except (TypeError, ValueError):
                raise SchemaError(
                    f"row {i + 2}, column {col!r}: non-numeric value {row[col]!r}") from None
    norms = np.linalg.norm(data, axis=0)
    norms[norms == 0] = 1.0
    data = data / norms

    attrs = list(protected[:1]) if group_mode == "disjoint" else list(protected)
    groups = []
    for col in attrs:
        for value in sorted({row[col] for row in rows}):
            groups.append([i for i, row in enumerate(rows) if row[col] == value])
    n = len(rows)
    k = min(10, n) if k is None else k
    lbs = [0] * len(groups) if lower_bounds is None else list(lower_bounds)
    return Instance(groups, lbs, k, client_points=data, metric="l1")


def group_labels(path, protected: Sequence[str], group_mode: str = "disjoint") -> list[str]:
    """Human-readable ``column=value`` label per group, in :func:`load_csv` order."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    attrs = list(protected[:1]) if group_mode == "disjoint" else list(protected)
    return [f"{col}={v}" for col in attrs for v in sorted({r[col] for r in rows})]
