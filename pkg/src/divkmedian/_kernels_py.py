"""Pure numpy versions of the compiled kernels (same signatures)."""

import numpy as np


def nearest_two(rows):
    rows = np.asarray(rows, dtype=np.float64)
    k, n = rows.shape
    cols = np.arange(n)
    near = np.argmin(rows, axis=0)
    d1 = rows[near, cols]
    if k < 2:
        return near, d1, np.full(n, -1, dtype=np.intp), np.full(n, np.inf)
    masked = rows.copy()
    masked[near, cols] = np.inf
    second = np.argmin(masked, axis=0)
    d2 = masked[second, cols]
    return near.astype(np.intp), d1, second.astype(np.intp), d2


def swap_deltas(cand, d1, d2, slot, k):
    cand = np.asarray(cand, dtype=np.float64)
    gain = np.minimum(cand - d1, 0.0).sum(axis=1)
    extra = np.maximum(np.minimum(cand, d2) - d1, 0.0)
    out = np.zeros((k, cand.shape[0]))
    onehot = np.zeros((k, cand.shape[1]))
    onehot[slot, np.arange(cand.shape[1])] = 1.0
    out += onehot @ extra.T
    out += gain
    return out


def subset_costs(dist_t, combos, chunk=2048):
    dist_t = np.asarray(dist_t, dtype=np.float64)
    combos = np.asarray(combos, dtype=np.intp)
    out = np.empty(len(combos))
    for lo in range(0, len(combos), chunk):
        block = dist_t[combos[lo:lo + chunk]]  # (B, k, n)
        out[lo:lo + chunk] = block.min(axis=1).sum(axis=1)
    return out
