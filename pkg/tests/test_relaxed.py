from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divkmedian import (Instance, LSConfig, UsageError, cost_frac, cost_hinge,
                        fig2_counterexample, kmedian_cost, ls0, random_metric, relaxed_ls)
from divkmedian.relaxed import (LAMBDA_GRID, RelaxParams, check_cardinality_inequality,
                                check_supermodular_full, check_supermodular_triple,
                                penalty_frac, penalty_frac_exact)


def three_groups():
    # F1 = {0,1,2}, F2 = {3,4,5}, F3 = {6..9}, r = (2, 2, 0)
    return Instance([[0, 1, 2], [3, 4, 5], [6, 7, 8, 9]], [2, 2, 0], 6, matrix=np.ones((1, 10)))


class TestHinge:
    def test_feasible_is_plain_cost(self):
        inst = fig2_counterexample(10)
        assert cost_hinge(inst, [2, 3], 5.0) == kmedian_cost(inst, [2, 3])

    def test_same_score_for_unbalanced_and_balanced(self):
        inst = three_groups()
        lopsided = [0, 1, 6, 7, 8, 9]  # counts (2, 0, 4)
        balanced = [0, 3, 6, 7, 8, 9]  # counts (1, 1, 4)
        lam = 3.0
        assert cost_hinge(inst, lopsided, lam) - kmedian_cost(inst, lopsided) == 2 * lam
        assert cost_hinge(inst, balanced, lam) - kmedian_cost(inst, balanced) == 2 * lam

    def test_zero_lambda(self):
        inst = three_groups()
        assert cost_hinge(inst, [0, 1, 6, 7, 8, 9], 0.0) == kmedian_cost(inst, [0, 1, 6, 7, 8, 9])


class TestFrac:
    def test_unbalanced(self):
        inst = Instance([[0, 1], [2, 3]], [2, 2], 2, matrix=np.ones((1, 4)))
        assert penalty_frac_exact(inst, [0, 1]) == Fraction(8, 3)
        assert penalty_frac(inst, [0, 1]) == pytest.approx(8 / 3, abs=1e-15)

    def test_balanced_cheaper(self):
        inst = Instance([[0, 1], [2, 3]], [2, 2], 2, matrix=np.ones((1, 4)))
        assert penalty_frac(inst, [0, 2]) == 2.0 < penalty_frac(inst, [0, 1])

    def test_zero_bounds(self):
        assert penalty_frac(three_groups().replace(lower_bounds=[0, 0, 0]), [0]) == 0.0

    def test_empty_set(self):
        assert penalty_frac(three_groups(), []) == 4.0

    def test_fig2_values(self):
        inst = fig2_counterexample(10)
        assert cost_frac(inst, [0, 1], 8.0) == 36.0
        assert cost_frac(inst, [2, 3], 8.0) == 18.0

    def test_lambda_zero_exact(self):
        inst = random_metric(30, 2, 4, [2, 2], seed=1)
        assert cost_frac(inst, [1, 5, 9, 20], 0.0) == kmedian_cost(inst, [1, 5, 9, 20])

    def test_deficient_addition_decreases(self):
        inst = three_groups()
        assert penalty_frac(inst, [0, 6, 3]) < penalty_frac(inst, [0, 6])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_non_increasing_under_inclusion(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_metric(12, 3, 3, [2, 1, 3], overlap=0.4, seed=seed)
        s = set(rng.choice(12, int(rng.integers(0, 6)), replace=False).tolist())
        t = s | set(rng.choice(12, int(rng.integers(0, 6)), replace=False).tolist())
        assert penalty_frac_exact(inst, t) <= penalty_frac_exact(inst, s)

    def test_params(self):
        with pytest.raises(UsageError):
            RelaxParams(-1.0)
        assert LAMBDA_GRID == (2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0)


class TestSupermodular:
    def test_subset_equality(self):
        # A ⊆ B: r/(a+1) + r/(b+1) on both sides
        assert check_supermodular_triple(range(5), 3, {0}, {0, 1, 2})
        assert check_cardinality_inequality({1}, {1, 2, 3})
        assert len({1} & {1, 2, 3}) * len({1} | {1, 2, 3}) == 1 * 3

    def test_disjoint_singletons(self):
        # 6/1 + 6/3 = 8 >= 6/2 + 6/2 = 6
        assert check_supermodular_triple({1, 2}, 6, {1}, {2})

    def test_equal_sets(self):
        assert check_supermodular_triple({1, 2, 3}, 4, {1, 2}, {1, 2})

    def test_cardinality_examples(self):
        assert check_cardinality_inequality({1, 2}, {2, 3})
        assert check_cardinality_inequality(set(), {4, 5})

    def test_non_subset(self):
        with pytest.raises(UsageError):
            check_supermodular_triple({1, 2}, 1, {3}, {1})

    @settings(max_examples=200, deadline=None)
    @given(st.sets(st.integers(0, 19), max_size=20), st.integers(0, 50), st.data())
    def test_triple_always_holds(self, group, r, data):
        pool = sorted(group)
        a = data.draw(st.sets(st.sampled_from(pool), max_size=len(pool))) if pool else set()
        b = data.draw(st.sets(st.sampled_from(pool), max_size=len(pool))) if pool else set()
        assert check_supermodular_triple(group, r, a, b)

    def test_full_function_exhaustive_small(self):
        inst = Instance([[0, 1, 2], [1, 3], [0, 3, 4]], [2, 5, 1], 2, matrix=np.ones((1, 5)))
        subsets = [set(s) for n in range(6) for s in combinations(range(5), n)]
        assert all(check_supermodular_full(inst, a, b) for a in subsets for b in subsets)

    def test_float_and_exact_agree(self):
        inst = Instance([[0, 1, 2], [1, 3]], [3, 7], 2, matrix=np.ones((1, 4)))
        for s in ([], [0], [1], [0, 1, 3]):
            assert penalty_frac(inst, s) == pytest.approx(float(penalty_frac_exact(inst, s)))


class TestRelaxedLS:
    def test_lambda_zero_matches_ls0(self):
        inst = random_metric(40, 3, 5, [2, 2, 1], seed=2)
        cfg = LSConfig(seed=5, restarts=3)
        a, b = relaxed_ls(inst, 0.0, cfg), ls0(inst, cfg=cfg)
        assert a.solution == b.solution and a.trace == b.trace

    @pytest.mark.parametrize("seed", range(6))
    def test_fig2_large_lambda(self, seed):
        rep = relaxed_ls(fig2_counterexample(10), 100.0, LSConfig(seed=seed, restarts=1))
        assert rep.solution.centers == (2, 3)

    def test_reports_violation(self):
        inst = random_metric(40, 2, 4, [3, 3], seed=1, overlap=0.2)
        rep = relaxed_ls(inst, 2.0, LSConfig(restarts=2))
        assert 0.0 <= rep.extras["violation_fraction"] <= 1.0
        assert rep.extras["lambda"] == 2.0

    def test_final_objective_is_cost_frac(self):
        inst = random_metric(40, 3, 5, [2, 2, 2], overlap=0.2, seed=3)
        rep = relaxed_ls(inst, 16.0, LSConfig(restarts=2))
        assert rep.final_cost == pytest.approx(cost_frac(inst, rep.solution.centers, 16.0))
        assert rep.final_cost <= rep.initial_cost
