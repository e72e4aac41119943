"""Diversity-aware k-median: instances, local search, relaxations and exact oracles."""

from ._backend import BACKEND
from .completion import ConstraintProfile, enumerate_profiles, solve_with_completion
from .errors import (DivKMedianError, InconclusiveError, InfeasibleError, OracleRefusal,
                     SchemaError, StaleCacheError, UndefinedMetricError, UsageError)
from .feasibility import check, complete_solution, find_feasible_exact, greedy_feasible
from .instance import (Graph, Instance, Solution, ValidationReport, fig2_counterexample,
                       from_domset, from_vertexcover, load_csv, load_instance, random_metric,
                       save_instance, validate)
from .localsearch import LSConfig, SolveReport, ls0, ls1, ls2, rb_swap
from .metrics import l1_representation, pod, violation_fraction
from .metricspace import CostCache, build_cache, kmedian_cost, swap_delta
from .oracle import exact_domset, exact_solve, exact_vertexcover
from .relaxed import LAMBDA_GRID, cost_frac, cost_hinge, relaxed_ls
from .shrink import ShrinkConfig, iterative_shrinking

__version__ = "0.1.0"
