import numpy as np
import pytest

from divkmedian import Instance, random_metric

_ACCEPTANCE: dict[str, bool] = {}  # criterion line -> all parametrizations passed


def line_instance(k=2, groups=None, lower_bounds=None):
    """Clients and facilities at 0, 1, 2, 5 on a line."""
    pts = np.array([[0.0], [1.0], [2.0], [5.0]])
    groups = groups or [[0, 1, 2, 3]]
    lower_bounds = lower_bounds or [0] * len(groups)
    return Instance(groups, lower_bounds, k, client_points=pts, metric="l1")


def small_disjoint(rng, m_max=10, t=2, k_max=4, exact_sum=True, n=None):
    """Random disjoint instance with feasible lower bounds (matrix form)."""
    m = int(rng.integers(max(t, 3), m_max + 1))
    k = int(rng.integers(1, min(k_max, m) + 1))
    perm = rng.permutation(m)
    cuts = np.sort(rng.choice(np.arange(1, m), size=t - 1, replace=False)) if t > 1 else []
    groups = [sorted(g.tolist()) for g in np.split(perm, cuts)]
    sizes = [len(g) for g in groups]
    lbs = [0] * t
    target = k if exact_sum else int(rng.integers(0, k))
    for _ in range(target):
        open_ = [i for i in range(t) if lbs[i] < sizes[i]]
        lbs[int(rng.choice(open_))] += 1
    n = n or int(rng.integers(3, 12))
    pts_c, pts_f = rng.random((n, 2)), rng.random((m, 2))
    mat = np.abs(pts_c[:, None, :] - pts_f[None, :, :]).sum(axis=2)
    return Instance(groups, lbs, k, matrix=mat)


def small_overlapping(rng, m_max=8, t_max=4):
    """Random instance with overlapping groups; lower bounds may be infeasible."""
    m = int(rng.integers(3, m_max + 1))
    t = int(rng.integers(1, t_max + 1))
    k = int(rng.integers(1, min(4, m) + 1))
    groups = [sorted(rng.choice(m, size=int(rng.integers(1, m + 1)), replace=False).tolist())
              for _ in range(t)]
    lbs = [int(rng.integers(0, min(len(g), k) + 1)) for g in groups]
    n = int(rng.integers(2, 10))
    mat = rng.random((n, m)) * 10
    return Instance(groups, lbs, k, matrix=mat)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def overlap_instance():
    return random_metric(30, 3, 5, [1, 1, 1], overlap=0.3, seed=2)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.get_closest_marker("acceptance"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE[doc] = _ACCEPTANCE.get(doc, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for doc, ok in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {doc}")


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel implementation."""
    from divkmedian import _backend, _kernels_py
    if request.param == "compiled":
        if _backend.BACKEND != "cython":
            pytest.skip("compiled kernels not built")
        return "cython"
    for name in ("nearest_two", "swap_deltas", "subset_costs"):
        monkeypatch.setattr(_backend, name, getattr(_kernels_py, name))
    return "python"
