"""Command-line entry point: ``divkmedian {gen,solve,bench,ingest}``.

Exit codes: 0 success, 2 usage or schema error, 3 infeasible or
inconclusive, 4 oracle refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time

import numpy as np

from .completion import solve_with_completion
from .errors import (DivKMedianError, InconclusiveError, InfeasibleError, OracleRefusal,
                     UsageError)
from .feasibility import check, disjoint_feasible
from .instance import (Graph, fig2_counterexample, from_domset, from_vertexcover,
                       group_labels, load_csv, load_instance, random_metric)
from .localsearch import LSConfig, SolveReport, ls0, ls1, ls2, rb_swap
from .metrics import l1_representation, pod, violation_fraction
from .oracle import exact_solve
from .relaxed import relaxed_ls
from .shrink import ShrinkConfig, iterative_shrinking

log = logging.getLogger("divkmedian")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_REFUSED = 0, 2, 3, 4
ALGOS = ("ls0", "ls1", "ls2", "rb", "relaxed", "shrink", "oracle")
SWEEP_ALGOS = ("ls1", "ls2", "rb", "shrink")
BENCH_HEADER = ["level", "algo", "seed", "cost", "pod", "l1", "l_star", "feasible", "seconds",
                "status"]


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()] if text else []


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()] if text else []


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


# -- gen -------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.kind == "fig2":
        inst = fig2_counterexample(args.c)
    elif args.kind == "random":
        if args.n is None or args.t is None or args.k is None:
            raise UsageError("gen random needs --n, --t and --k")
        inst = random_metric(args.n, args.t, args.k, _int_list(args.lower_bounds) or None,
                             overlap=args.overlap, seed=args.seed, dim=args.dim,
                             n_facilities=args.facilities)
    else:
        if not args.graph or args.k is None:
            raise UsageError(f"gen {args.kind} needs --graph and --k")
        with open(args.graph) as fh:
            g = Graph.from_dict(json.load(fh))
        inst = (from_domset if args.kind == "domset" else from_vertexcover)(g, args.k)
    _emit(_dump(inst.to_dict()), args.out)
    return EXIT_OK


# -- solve -----------------------------------------------------------------------


def _ls_config(args, restarts=None) -> LSConfig:
    return LSConfig(seed=args.seed, restarts=restarts or args.restarts,
                    max_iter=args.max_iter, threads=args.threads)


def _use_completion(args, inst) -> bool:
    slack = sum(inst.lower_bounds) < inst.k
    if args.profile_mode == "completion":
        return slack
    if args.profile_mode == "auto":
        return slack and args.algo == "rb"
    return False


def run_algo(inst, args) -> SolveReport | None:
    """Dispatch one solver call; ``None`` means no solution was found."""
    algo = args.algo
    init = _int_list(args.init) or None
    cfg = _ls_config(args)
    if algo == "oracle":
        t0 = time.perf_counter()
        res = exact_solve(inst)
        if res is None:
            return None
        sol, cost = res
        return SolveReport(sol, "oracle", cost, cost, 0, 0, args.seed,
                           time.perf_counter() - t0, "exhaustive", check(inst, sol.centers))
    if algo == "ls0":
        return ls0(inst, cfg=cfg)
    if algo == "relaxed":
        return relaxed_ls(inst, args.lam, cfg)
    if algo == "shrink":
        scfg = ShrinkConfig(epsilon=args.epsilon, max_iter=args.max_iter or 50,
                            policy=args.policy,
                            inner=LSConfig(seed=args.seed, restarts=1, threads=args.threads))
        return iterative_shrinking(inst, scfg)
    solvers = {"ls1": lambda sub, c: ls1(sub, c),
               "ls2": lambda sub, c: ls2(sub, c),
               "rb": lambda sub, c: rb_swap(sub, c)}
    if algo in ("ls2", "rb") and not inst.disjoint:
        raise UsageError(f"{algo} requires disjoint groups")
    if algo == "rb" and inst.n_groups != 2:
        raise UsageError(f"rb requires exactly 2 groups, got {inst.n_groups}")
    if _use_completion(args, inst):
        if not inst.disjoint:
            raise UsageError("profile completion requires disjoint groups")
        rep = solve_with_completion(inst, solvers[algo], cfg, threads=args.threads)
        rep.algo = algo
        return rep
    if algo == "ls1":
        return ls1(inst, cfg, init=init)
    if algo == "ls2":
        return ls2(inst, cfg, init=init)
    return rb_swap(inst, cfg, init=init)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    inst.report.raise_for_violations()
    rep = run_algo(inst, args)
    if rep is None:
        print(f"{args.algo}: no solution found", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(_dump(rep.to_dict(timing=not args.no_timing)), args.out)
    return EXIT_OK


# -- bench -----------------------------------------------------------------------


def random_feasible_start(inst, rng: np.random.Generator):
    """Random feasible set for disjoint groups: ``r_i`` per group plus random fill."""
    picks: set[int] = set()
    for g, r in zip(inst.groups, inst.lower_bounds):
        if r:
            picks.update(int(f) for f in rng.choice(np.asarray(g), size=r, replace=False))
    rest = np.array([f for f in range(inst.n_facilities) if f not in picks])
    picks.update(int(f) for f in rng.choice(rest, size=inst.k - len(picks), replace=False))
    return sorted(picks)


def minority_bounds(t: int, k: int, minority: int, fraction: float) -> list[int]:
    """Lower bounds demanding ``ceil(fraction * k)`` centers from the minority group."""
    r = [0] * t
    # the tolerance keeps 0.3 * 10 = 3.0000000000000004 from rounding up to 4
    r[minority] = math.ceil(fraction * k - 1e-9)
    return r


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


def cmd_bench(args) -> int:
    inst = load_instance(args.instance)
    inst.report.raise_for_violations()
    fractions = _float_list(args.minority_fractions)
    lambdas = _float_list(args.lambdas)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    if not fractions and not lambdas:
        _emit(buf.getvalue(), args.out)
        return EXIT_OK

    algos = [a for a in args.algos.split(",") if a]
    unknown = sorted(set(algos) - set(SWEEP_ALGOS))
    if fractions and unknown:
        raise UsageError(f"cannot sweep minority fractions with {unknown}; "
                         f"choose from {list(SWEEP_ALGOS)}")
    timing = not args.no_timing
    base = ls0(inst, cfg=LSConfig(seed=args.seed, restarts=10, threads=args.threads))
    base_cost = base.solution.cost
    base_counts = base.solution.per_group_counts
    k, t = inst.k, inst.n_groups

    def row(level, algo, seed, rep, sub, status="ok"):
        if rep is None:
            writer.writerow([_fmt(level), algo, seed, "", "", "", "", "", "", status])
            return
        cost = rep.solution.cost
        try:
            p = pod(cost, base_cost)
        except DivKMedianError:
            p = None
        try:
            lstar = violation_fraction(sub, rep.solution.centers)
        except DivKMedianError:
            lstar = None
        l1 = l1_representation(rep.solution.per_group_counts, base_counts, k, t)
        writer.writerow([_fmt(level), algo, seed, _fmt(cost), _fmt(p), _fmt(l1), _fmt(lstar),
                         str(check(sub, rep.solution.centers)).lower(),
                         _fmt(rep.wall_time if timing else 0.0), status])

    row("baseline", "ls0", args.seed, base, inst)

    def sweep(level, sub, algos, runner):
        best = {}
        for algo in algos:
            for s in range(args.restarts):
                seed = args.seed + s
                try:
                    rep = runner(algo, sub, seed)
                    status = "ok" if rep is not None else "no_solution"
                except InfeasibleError:
                    rep, status = None, "infeasible"
                except InconclusiveError:
                    rep, status = None, "inconclusive"
                row(level, algo, seed, rep, sub, status)
                if rep is not None and (algo not in best
                                        or rep.final_cost < best[algo].final_cost):
                    best[algo] = rep
            row(level, algo, "min", best.get(algo), sub,
                "ok" if algo in best else "infeasible")

    if fractions:
        minority = (args.minority_group if args.minority_group is not None
                    else int(np.argmin(inst.group_sizes)))

        def run_constrained(algo, sub, seed):
            cfg = LSConfig(seed=seed, restarts=1, max_iter=args.max_iter, threads=1)
            if sub.disjoint and not disjoint_feasible(sub):
                raise InfeasibleError(f"lower bounds {list(sub.lower_bounds)} unattainable")
            if algo == "ls1":
                init = (random_feasible_start(sub, np.random.default_rng(seed))
                        if sub.disjoint else None)
                return ls1(sub, cfg, init=init)
            if algo == "ls2":
                return ls2(sub, cfg)
            if algo == "rb":
                if sum(sub.lower_bounds) < sub.k:
                    return solve_with_completion(sub, lambda s, c: rb_swap(s, c), cfg)
                return rb_swap(sub, cfg)
            if algo == "shrink":
                return iterative_shrinking(sub, ShrinkConfig(
                    epsilon=args.epsilon, policy=args.policy,
                    inner=LSConfig(seed=seed, restarts=1)))
            raise AssertionError(algo)

        for frac in fractions:
            sweep(frac, inst.replace(lower_bounds=minority_bounds(t, k, minority, frac)),
                  algos, run_constrained)

    if lambdas:
        def run_relaxed(_algo, sub, seed):
            return relaxed_ls(sub, lam, LSConfig(seed=seed, restarts=1, max_iter=args.max_iter))

        for lam in lambdas:
            sweep(lam, inst, ["relaxed"], run_relaxed)

    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- ingest ----------------------------------------------------------------------


def cmd_ingest(args) -> int:
    protected = [c for c in (args.protected or "").split(",") if c]
    features = [c for c in args.features.split(",") if c] if args.features else None
    inst = load_csv(args.csv, protected, features=features, group_mode=args.group_mode,
                    k=args.k, lower_bounds=_int_list(args.lower_bounds) or None)
    labels = group_labels(args.csv, protected, args.group_mode)
    sizes = inst.group_sizes
    print(f"{'group':<24} {'size':>6}", file=sys.stderr)
    for label, size in zip(labels, sizes):
        print(f"{label:<24} {size:>6}", file=sys.stderr)
    print(f"n={inst.n_clients} t={inst.n_groups} min={min(sizes)} max={max(sizes)}",
          file=sys.stderr)
    _emit(_dump(inst.to_dict()), args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="divkmedian",
                                     description="Diversity-aware k-median toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("kind", choices=["fig2", "random", "domset", "vertexcover"])
    gen.add_argument("--c", type=float, default=10.0, help="far distance for fig2")
    gen.add_argument("--n", type=int)
    gen.add_argument("--t", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--facilities", type=int, help="distinct facility count (random)")
    gen.add_argument("--lower-bounds", help="comma-separated r_i")
    gen.add_argument("--overlap", type=float, default=0.0)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--graph", help="graph JSON {\"n\": .., \"edges\": [[u, v], ..]}")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    def solver_flags(p):
        p.add_argument("instance")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=10)
        p.add_argument("--lambda", dest="lam", type=float, default=8.0)
        p.add_argument("--epsilon", type=float, default=0.1)
        p.add_argument("--policy", choices=["uniform", "power"], default="power")
        p.add_argument("--max-iter", type=int)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--no-timing", action="store_true")
        p.add_argument("--out")

    solve = sub.add_parser("solve", help="solve an instance JSON")
    solver_flags(solve)
    solve.add_argument("--algo", choices=ALGOS, default="ls1")
    solve.add_argument("--init", help="comma-separated initial centers")
    solve.add_argument("--profile-mode", choices=["auto", "direct", "completion"],
                       default="auto")
    solve.set_defaults(func=cmd_solve)

    bench = sub.add_parser("bench", help="constraint sweep emitting CSV")
    solver_flags(bench)
    bench.add_argument("--minority-fractions", help="e.g. 0.1,0.2,0.3")
    bench.add_argument("--minority-group", type=int)
    bench.add_argument("--lambdas", help="relaxed-objective sweep, e.g. 2,4,8")
    bench.add_argument("--algos", default="ls1,ls2")
    bench.set_defaults(func=cmd_bench)

    ingest = sub.add_parser("ingest", help="CSV table to instance JSON")
    ingest.add_argument("csv")
    ingest.add_argument("--protected", required=True, help="comma-separated column names")
    ingest.add_argument("--features", help="comma-separated feature columns (default: rest)")
    ingest.add_argument("--group-mode", choices=["disjoint", "intersect"], default="disjoint")
    ingest.add_argument("--k", type=int)
    ingest.add_argument("--lower-bounds")
    ingest.add_argument("--out")
    ingest.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except OracleRefusal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (InfeasibleError, InconclusiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
