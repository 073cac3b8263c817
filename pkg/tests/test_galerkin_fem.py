import math

import numpy as np
import pytest

from fracbvp.errors import IncompatibleData
from fracbvp.frac_grid import GridFunction
from fracbvp.galerkin_fem import assemble, interval_pairings, solve_fem, stiffness_matrix
from fracbvp.reduction_solvers import solve
from fracbvp.special import PowerSum
from fracbvp.wellposedness import ProblemSpec

M1 = PowerSum.constant(-1.0)


@pytest.mark.parametrize("beta", [0.2, 0.5, 0.9])
def test_pairings_quadrature_vs_closed_form(beta):
    gl = interval_pairings(beta, 64)
    ex = interval_pairings(beta, 64, "exact")
    np.testing.assert_allclose(gl, ex, rtol=1e-7)
    assert ex[0] == pytest.approx(1.0 / math.gamma(beta + 2))


@pytest.mark.parametrize("beta", [0.3, 0.7])
def test_constants_in_kernel(beta):
    B = stiffness_matrix(beta, 32)
    assert np.max(np.abs(B @ np.ones(33))) <= 1e-10
    assert np.max(np.abs(np.ones(33) @ B)) <= 1e-10


def test_zero_data():
    s = assemble(0.5, 16, PowerSum(), 0.0, 0.0)
    assert not s.rhs.any()
    assert not solve_fem(s).values.any()
    assert s.matrix.shape == (18, 18)


def test_load_vector():
    n = 16
    s = assemble(0.5, n, M1, 0.2, 1.2)
    c = np.full(n + 1, 1 / n)
    c[[0, -1]] = 0.5 / n
    expected = -c
    expected[0] -= 0.2
    expected[-1] += 1.2
    np.testing.assert_allclose(s.load, expected, atol=1e-15)
    # sampled source of the same function gives the same load
    g = assemble(0.5, n, GridFunction.constant(-1.0, 40), 0.2, 1.2)
    np.testing.assert_allclose(g.load, expected, atol=1e-14)
    # right-sided terms mirror
    r = assemble(0.5, n, PowerSum.monomial(1.0, 1.0, "right"), 0.0, 0.0)
    l = assemble(0.5, n, PowerSum.monomial(1.0, 1.0), 0.0, 0.0)
    np.testing.assert_allclose(r.load, l.load[::-1], atol=1e-15)


@pytest.mark.parametrize("beta", [0.2, 0.5, 0.8])
def test_coercivity(beta):
    rng = np.random.default_rng(7)
    n = 64
    B = assemble(beta, n, PowerSum(), 0.0, 0.0).stiffness
    c = np.full(n + 1, 1.0 / n)
    c[[0, -1]] *= 0.5
    for _ in range(50):
        v = rng.normal(size=n + 1)
        v -= (c @ v) / c.sum()
        assert v @ B @ v > 0


def test_incompatible_rejected():
    with pytest.raises(IncompatibleData):
        solve_fem(assemble(0.5, 32, M1, 0.0, 0.5))


def test_mean_zero_solution():
    n = 64
    u = solve_fem(assemble(0.5, n, M1, 0.3, 1.3))
    assert abs(np.trapezoid(u.values, dx=1 / n)) < 1e-12


@pytest.mark.parametrize("a0", [0.0, 0.3])
def test_agreement_with_reduction(a0):
    ref = solve(ProblemSpec("Conserv", "CaputoN", 0.5, M1, a0, a0 + 1.0), report=False)
    dist = []
    for n in (64, 128, 256, 512):
        u = solve_fem(assemble(0.5, n, M1, a0, a0 + 1.0))
        dist.append(np.max(np.abs(u.values - ref.regular(u.x))))
    assert all(d1 < d0 for d0, d1 in zip(dist, dist[1:]))
    assert dist[2] <= 1e-2
    if a0 == 0.0:
        # smooth-ish solution: at least halving under refinement
        assert all(d1 <= 0.5 * d0 for d0, d1 in zip(dist, dist[1:]))


@pytest.mark.parametrize("beta", [0.3, 0.7])
def test_quadrature_routes_give_same_solution(beta):
    gl = solve_fem(assemble(beta, 128, M1, 0.3, 1.3))
    ex = solve_fem(assemble(beta, 128, M1, 0.3, 1.3, quadrature="exact"))
    assert np.max(np.abs(gl.values - ex.values)) <= 1e-6
