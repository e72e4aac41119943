"""Compiled vs pure-numpy kernel timings.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 2000] [--m 400] [--k 10]

Prints one line per kernel with the best-of-``repeat`` wall time for each
backend and the speed-up.  The end-to-end row runs ``ls0`` with each backend
patched into ``divkmedian._backend``.
"""

import argparse
import sys
import timeit
from contextlib import contextmanager
from itertools import combinations

import numpy as np

from divkmedian import LSConfig, _backend, _kernels_py, ls0, random_metric

NAMES = ("nearest_two", "swap_deltas", "subset_costs")


@contextmanager
def use(module):
    saved = {name: getattr(_backend, name) for name in NAMES}
    for name in NAMES:
        setattr(_backend, name, getattr(module, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(_backend, name, fn)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def cases(args):
    rng = np.random.default_rng(0)
    rows = rng.random((args.k, args.n))
    cand = rng.random((args.m, args.n))
    d1 = rows.min(axis=0)
    d2 = np.sort(rows, axis=0)[1]
    slot = rng.integers(args.k, size=args.n).astype(np.intp)
    small = rng.random((24, args.n // 4))
    combos = np.array(list(combinations(range(24), 4)), dtype=np.intp)
    inst = random_metric(args.n // 2, 3, args.k, [1, 1, 1], seed=1)
    cfg = LSConfig(seed=0, restarts=1)
    return {
        "nearest_two": lambda k: k.nearest_two(rows),
        "swap_deltas": lambda k: k.swap_deltas(cand, d1, d2, slot, args.k),
        "subset_costs": lambda k: k.subset_costs(small, combos),
        "ls0 end-to-end": lambda k: ls0(inst, cfg=cfg),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=2000, help="clients")
    ap.add_argument("--m", type=int, default=400, help="candidate facilities")
    ap.add_argument("--k", type=int, default=10)
    args = ap.parse_args(argv)
    if _backend.BACKEND != "cython":
        print("compiled kernels are not available; build with pip install -e .", file=sys.stderr)
        return 1
    compiled = _backend.kernels
    print(f"{'kernel':<16} {'cython s':>10} {'python s':>10} {'speed-up':>9}")
    for name, run in cases(args).items():
        with use(compiled):
            fast = best(lambda: run(compiled), args.repeat)
        with use(_kernels_py):
            slow = best(lambda: run(_kernels_py), args.repeat)
        print(f"{name:<16} {fast:>10.5f} {slow:>10.5f} {slow / fast:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
