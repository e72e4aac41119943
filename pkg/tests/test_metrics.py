import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divkmedian import (Instance, UndefinedMetricError, UsageError, check, kmedian_cost,
                        l1_representation, pod, random_metric, violation_fraction)


class TestPod:
    def test_formula(self):
        assert pod(12, 10) == pytest.approx(0.2)

    def test_equal(self):
        assert pod(7.5, 7.5) == 0.0

    def test_fig2(self):
        assert pod(20, 2) == 9.0

    def test_zero_base(self):
        with pytest.raises(UndefinedMetricError):
            pod(1.0, 0.0)
        with pytest.raises(ZeroDivisionError):
            pod(1.0, 0.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 1e3), st.integers(0, 1000))
    def test_scale_invariant(self, alpha, seed):
        inst = random_metric(15, 2, 3, seed=seed)
        scaled = inst.replace(matrix=inst.dist * alpha)
        a, b = [0, 1, 2], [3, 4, 5]
        p1 = pod(kmedian_cost(inst, a), kmedian_cost(inst, b))
        p2 = pod(kmedian_cost(scaled, a), kmedian_cost(scaled, b))
        assert p1 == pytest.approx(p2, rel=1e-9, abs=1e-12)


class TestL1:
    def test_formula(self):
        assert l1_representation([3, 7], [5, 5], 10, 2) == pytest.approx(0.2)

    def test_identical(self):
        assert l1_representation([2, 3, 5], [2, 3, 5], 10) == 0.0

    def test_maximal(self):
        assert l1_representation([0, 10], [10, 0], 10, 2) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(UsageError):
            l1_representation([1, 2], [1, 2, 3], 3)
        with pytest.raises(UsageError):
            l1_representation([1, 2], [1, 2], 3, t=3)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 12), st.data())
    def test_symmetric_and_bounded(self, t, k, data):
        def counts():
            # a disjoint-group solution: non-negative counts summing to k
            cuts = sorted(data.draw(st.lists(st.integers(0, k), min_size=t - 1,
                                             max_size=t - 1)))
            edges = [0] + cuts + [k]
            return [b - a for a, b in zip(edges, edges[1:])]
        a, b = counts(), counts()
        v = l1_representation(a, b, k, t)
        assert v == l1_representation(b, a, k, t)
        assert 0.0 <= v <= 1.0


class TestViolation:
    def inst(self):
        groups = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]]
        return Instance(groups, [3, 3, 3, 3], 12, matrix=np.ones((1, 12)))

    def test_feasible_zero(self):
        assert violation_fraction(self.inst(), range(12)) == 0.0

    def test_partial(self):
        # counts (3, 3, 1, 0)
        assert violation_fraction(self.inst(), [0, 1, 2, 3, 4, 5, 6]) == pytest.approx(5 / 12)

    def test_untouched(self):
        assert violation_fraction(self.inst(), []) == 1.0

    def test_zero_bounds(self):
        with pytest.raises(UndefinedMetricError):
            violation_fraction(self.inst().replace(lower_bounds=[0] * 4), [0])

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6))
    def test_range_and_zero_iff_counts_met(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_metric(12, 3, 4, [1, 2, 1], overlap=0.3, seed=seed)
        s = rng.choice(12, 4, replace=False).tolist()
        v = violation_fraction(inst, s)
        assert 0.0 <= v <= 1.0
        assert (v == 0.0) == check(inst, s)
