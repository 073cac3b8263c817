import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracbvp.classical_bvp import (
    Representative,
    mean_value,
    mean_zero_normalize,
    neumann_residual,
    solve_dirichlet,
    solve_neumann,
)
from fracbvp.errors import IncompatibleData
from fracbvp.frac_grid import GridFunction, second_difference
from fracbvp.special import PowerSum


def test_dirichlet_examples():
    w = solve_dirichlet(0.0, 0.3, 1.7).w
    assert w.allclose(PowerSum.from_pairs([(0.3, 0.0), (1.4, 1.0)]))
    w = solve_dirichlet(1.0, 0.0, 0.0).w
    assert float(w(0.5)) == pytest.approx(0.125)
    assert w.allclose(PowerSum.from_pairs([(0.5, 1.0), (-0.5, 2.0)]))
    # g = Df with f = -1 vanishes; data a0, a0 + 1 give w = a0 + x
    w = solve_dirichlet(PowerSum(), 0.3, 1.3).w
    assert w.allclose(PowerSum.from_pairs([(0.3, 0.0), (1.0, 1.0)]))


def test_dirichlet_sampled_source():
    g = GridFunction.constant(1.0, 64)
    sol = solve_dirichlet(g, 0.0, 0.0)
    np.testing.assert_allclose(sol.w.values, g.x * (1 - g.x) / 2, atol=1e-14)


def test_dirichlet_manufactured_sine():
    for n in (32, 64, 128):
        g = GridFunction.from_function(lambda x: math.pi**2 * np.sin(math.pi * x), n)
        w = solve_dirichlet(g, 0.0, 0.0).w
        err = np.max(np.abs(w.values - np.sin(math.pi * w.x)))
        assert err <= 5.0 / n**2


def test_dirichlet_residual_order():
    errs = []
    for n in (32, 64, 128, 256):
        g = GridFunction.from_function(lambda x: np.exp(x) * np.cos(2 * x), n)
        w = solve_dirichlet(g, 0.2, -0.4).w
        lap = -second_difference(w.values, w.h)
        errs.append(np.max(np.abs(lap[1:-1] - g.values[1:-1])))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(3)]
    assert min(orders) >= 1.9


def test_neumann_examples():
    sol = solve_neumann(0.0, 0.0, 0.0)
    assert sol.w.is_zero()
    sol = solve_neumann(-1.0, 0.3, 1.3)
    ref = PowerSum.from_pairs([(0.5, 2.0), (0.3, 1.0), (-(1 / 6 + 0.15), 0.0)])
    assert sol.w.allclose(ref, atol=1e-14)
    assert float(sol.w(0.0)) == pytest.approx(-0.3166666667, abs=1e-10)
    assert sol.representative is Representative.MEAN_ZERO
    with pytest.raises(IncompatibleData) as info:
        solve_neumann(-1.0, 0.0, 0.0)
    assert info.value.residual == pytest.approx(-1.0)


def test_neumann_representatives():
    anchored = solve_neumann(-1.0, 0.3, 1.3, representative="AnchoredAtZero").w
    assert float(anchored(0.0)) == 0.0
    assert mean_value(solve_neumann(-1.0, 0.3, 1.3).w) == pytest.approx(0.0, abs=1e-15)


def test_neumann_slope_unique_across_grids():
    fn = lambda x: np.cos(3 * x)
    slopes = {}
    for n in (64, 256):
        g = GridFunction.from_function(fn, n)
        n1 = 0.2 - float(np.trapezoid(g.values, dx=g.h))
        slopes[n] = solve_neumann(g, 0.2, n1, tol=1e-6).slope
    shared = slopes[256].values[::4]
    assert np.max(np.abs(shared - slopes[64].values)) < 1e-4


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_residual_formula(c, n0, n1):
    assert neumann_residual(PowerSum.constant(c), n0, n1) == pytest.approx(c + n1 - n0, abs=1e-12)


@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(0, 3)), max_size=4))
def test_mean_zero_idempotent(pairs):
    p = PowerSum.from_pairs(pairs)
    once = mean_zero_normalize(p)
    assert abs(mean_value(once)) <= 1e-12
    assert mean_zero_normalize(once).allclose(once, atol=1e-12)
