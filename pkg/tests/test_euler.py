import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerist import GridSpec, MultiFiltration, compute_ecp, l1_window_norm, pushforward_ecc, quantile_grid
from eulerist.euler import ProfileGrid

from oracles import brute_ecp, chi_at, random_filtration, random_filtration_on

TWO_COMPONENTS = MultiFiltration.from_dict({(0,): 0, (1,): 0, (0, 1): 1})


def test_gridspec_axes_include_endpoints():
    g = GridSpec((0.0, -1.0), (1.0, 1.0), (3, 5))
    assert g.shape == (3, 5) and g.size == 15
    assert g.axes()[0].tolist() == [0.0, 0.5, 1.0]
    assert GridSpec((2.0,), (2.0,), (1,)).axes()[0].tolist() == [2.0]
    with pytest.raises(ValueError):
        GridSpec((1.0,), (0.0,), (3,))
    with pytest.raises(ValueError):
        GridSpec((0.0,), (1.0,), (0,))


def test_compute_ecp_examples():
    grid = compute_ecp(TWO_COMPONENTS, GridSpec((0,), (1,), (3,)))
    assert grid.data.tolist() == [2, 2, 1]
    f = MultiFiltration.from_dict({(0,): (0, 0), (1,): (0, 0), (0, 1): (1, 1)})
    assert compute_ecp(f, GridSpec((0, 0), (1, 1), (2, 2))).data.tolist() == [[2, 2], [2, 1]]


def test_compute_ecp_axis_mismatch():
    with pytest.raises(ValueError):
        compute_ecp(TWO_COMPONENTS, GridSpec((0, 0), (1, 1), (2, 2)))


def test_compute_ecp_clamps_and_drops():
    # below the grid: present at the origin; above: absent everywhere
    f = MultiFiltration.from_dict({(0,): -5, (1,): 10})
    assert compute_ecp(f, GridSpec((0,), (1,), (2,))).data.tolist() == [1, 1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.booleans())
def test_compute_ecp_matches_recount(seed, m, integer_values):
    rng = np.random.default_rng(seed)
    f = random_filtration(rng, m, max_simplices=40, integer_values=integer_values)
    res = tuple(int(d) for d in rng.integers(1, 6, size=m))
    lo = rng.uniform(-1, 1, size=m)
    hi = lo + rng.uniform(0.5, 5, size=m)
    spec = GridSpec(tuple(lo), tuple(np.where(np.array(res) == 1, lo, hi)), res)
    got = compute_ecp(f, spec)
    assert got.data.dtype == np.int64
    assert np.array_equal(got.data, brute_ecp(f, spec.axes()))


def test_top_corner_is_chi_of_bounded_simplices(rng):
    f = random_filtration(rng, 2)
    spec = GridSpec((0, 0), (2, 2), (4, 4))
    inside = np.all(f.values <= 2, axis=1)
    assert compute_ecp(f, spec).data[-1, -1] == f.signs[inside].sum()


def test_pushforward_examples(rng):
    spec = GridSpec((0,), (3,), (7,))
    assert np.array_equal(pushforward_ecc(TWO_COMPONENTS, [1.0], spec).data, compute_ecp(TWO_COMPONENTS, spec).data)
    f = random_filtration(rng, 2)
    xi = np.array([2.0, 0.5])
    by_hand = MultiFiltration(f.simplices, (f.values * xi).sum(axis=1, keepdims=True))
    assert np.array_equal(pushforward_ecc(f, xi, spec).data, compute_ecp(by_hand, spec).data)
    with pytest.raises(ValueError):
        pushforward_ecc(f, [0.0, 0.0], spec)
    with pytest.raises(ValueError):
        pushforward_ecc(f, [-1.0, 1.0], spec)


def test_quantile_grid_examples():
    values = np.arange(1.0, 11.0)
    g = quantile_grid(values, [(0.1, 0.9)], 5)
    assert np.allclose(g.axes()[0], [1.9, 3.7, 5.5, 7.3, 9.1])
    g = quantile_grid(values, [(0.0, 1.0)], 3)
    assert (g.mins, g.maxs) == ((1.0,), (10.0,))
    with pytest.warns(RuntimeWarning):
        g = quantile_grid(np.full(5, 2.0), [(0.1, 0.9)], 10)
    assert g.shape == (1,) and g.mins == (2.0,)
    with pytest.raises(ValueError):
        quantile_grid(values, [(0.5, 0.5)], 3)


def test_l1_window_examples():
    phi = MultiFiltration.from_dict({(0,): 0.0})
    empty = MultiFiltration([], [], m=1)
    assert l1_window_norm(phi, empty, 2.0) == 2.0
    assert l1_window_norm(phi, phi, 2.0) == 0.0


def test_l1_window_monte_carlo(rng):
    a = random_filtration_on(rng, random_filtration(rng, 2, max_simplices=20).simplices, 2)
    b = random_filtration_on(rng, random_filtration(rng, 2, max_simplices=20).simplices, 2)
    M = 3.0
    exact = l1_window_norm(a, b, M)
    U = rng.uniform(-M, M, size=(1_000_000, 2))

    def ecp_at(f):
        inside = np.ones(len(U), dtype=np.int64) * 0
        for s, t in zip(f.signs, f.values):
            inside += s * np.all(U >= t, axis=1)
        return inside

    estimate = np.mean(np.abs(ecp_at(a) - ecp_at(b))) * (2 * M) ** 2
    assert estimate == pytest.approx(exact, rel=0.01)


def test_l1_window_metric_properties(rng):
    fs = [random_filtration(rng, 1, max_simplices=15) for _ in range(3)]
    d = lambda x, y: l1_window_norm(x, y, 4.0)
    assert d(fs[0], fs[1]) == pytest.approx(d(fs[1], fs[0]))
    assert d(fs[0], fs[2]) <= d(fs[0], fs[1]) + d(fs[1], fs[2]) + 1e-12


def test_l1_window_guard():
    with pytest.raises(ValueError):
        l1_window_norm(TWO_COMPONENTS, TWO_COMPONENTS, 0.0)


def test_profile_sidecar():
    grid = compute_ecp(TWO_COMPONENTS, GridSpec((0,), (1,), (3,)))
    assert grid.sidecar() == {"m": 1, "shape": [3], "axis_min": [0.0], "axis_max": [1.0], "kind": "ecp"}
    with pytest.raises(ValueError):
        ProfileGrid(GridSpec((0,), (1,), (3,)), np.zeros(4))
