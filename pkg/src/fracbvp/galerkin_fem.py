"""Piecewise-linear Galerkin solver for ``-D(I^β Du) = f`` with flux data.

Weak form: find ``u`` with ``int u = 0`` such that for every hat ``v``

    B(u, v) = (I_+^{β/2} Du, I_-^{β/2} Dv) = <f, v> + a1 v(1) - a0 v(0).

Hat derivatives are combinations of interval indicators ``χ_k``, so the
stiffness matrix is ``E^T M^T E`` with ``E`` the nodal difference operator
and ``M[k, l] = (I_+^{β/2} χ_k, I_-^{β/2} χ_l)``.  On a uniform mesh ``M``
is Toeplitz and upper triangular: ``M[k, l] = h^{β+1} m(l - k)``.

The module shares no code with the reduction solvers beyond the special
functions, which makes it usable as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleData, SingularSystem
from .frac_grid import GridFunction
from .special import FracOrder, PowerSum, Side, gamma
from .tolerances import scaled_tolerance

__all__ = ["FemSystem", "assemble", "solve_fem", "interval_pairings", "stiffness_matrix"]

GL_POINTS = 8
# pieces next to a kernel breakpoint are split geometrically towards their ends
GRADING_LEVELS = 20
GRADING_RATIO = 0.15
MIN_ELEMENTS = 8


@dataclass(frozen=True, eq=False)
class FemSystem:
    """Saddle-point system ``[[B, c], [c^T, 0]] [u, λ] = [l, 0]``.

    ``c[i] = int φ_i`` carries the mean-zero constraint.  ``scale`` is the
    data magnitude used to judge whether ``sum(l)`` (which equals
    ``<f, 1> + a1 - a0``) vanishes.
    """

    beta: FracOrder
    n: int
    matrix: np.ndarray
    rhs: np.ndarray
    scale: float = 1.0

    @property
    def stiffness(self) -> np.ndarray:
        return self.matrix[: self.n + 1, : self.n + 1]

    @property
    def load(self) -> np.ndarray:
        return self.rhs[: self.n + 1]

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)


# {{{ interval pairings


def _pairings_exact(beta: float, n: int) -> np.ndarray:
    d = np.arange(n, dtype=float)
    p = beta + 1.0
    m = (d + 1.0) ** p - 2.0 * d**p + np.maximum(d - 1.0, 0.0) ** p
    return m / gamma(beta + 2.0)


def _graded_rule(levels: int = GRADING_LEVELS, ratio: float = GRADING_RATIO):
    """Composite Gauss-Legendre rule on [0, 1], graded geometrically towards both ends."""
    t, w = np.polynomial.legendre.leggauss(GL_POINTS)
    t, w = 0.5 * (t + 1.0), 0.5 * w
    half = np.concatenate([[0.0], 0.5 * ratio ** np.arange(levels, -1, -1)])
    edges = np.concatenate([half, 1.0 - half[-2::-1]])
    a, b = edges[:-1], edges[1:]
    nodes = (a[:, None] + (b - a)[:, None] * t[None, :]).ravel()
    weights = ((b - a)[:, None] * w[None, :]).ravel()
    return nodes, weights


def _pairings_gauss(beta: float, n: int) -> np.ndarray:
    g = 0.5 * beta
    t, w = np.polynomial.legendre.leggauss(GL_POINTS)
    t, w = 0.5 * (t + 1.0), 0.5 * w
    gt, gw = _graded_rule()

    def integrand(s, d):
        P = s**g - np.maximum(s - 1.0, 0.0) ** g
        Q = np.maximum(d + 1.0 - s, 0.0) ** g - np.maximum(d - s, 0.0) ** g
        return P * Q

    out = np.empty(n)
    for d in range(n):
        # unit pieces [j, j+1] of (0, d+1); the power kernels start at t = 0, 1, d, d+1,
        # so pieces touching those points get the graded rule
        special = sorted({0, 1, d - 1, d} & set(range(d + 1)))
        plain = np.setdiff1d(np.arange(d + 1), special)
        total = 0.0
        if plain.size:
            s = (plain[:, None] + t[None, :]).ravel()
            total += np.dot(np.tile(w, plain.size), integrand(s, d))
        for j in special:
            total += np.dot(gw, integrand(j + gt, d))
        out[d] = total
    return out / gamma(1.0 + g) ** 2


def interval_pairings(beta, n: int, quadrature: str = "gauss-legendre") -> np.ndarray:
    """``m(d)``, d = 0..n-1, in units where the mesh width is 1.

    ``"gauss-legendre"`` integrates the product of the two half-order
    integrals piecewise (8 points per piece, geometrically graded pieces
    next to the kernel breakpoints); ``"exact"`` uses the closed form
    ``((d+1)^{β+1} - 2 d^{β+1} + (d-1)_+^{β+1}) / Γ(β+2)``.
    """
    b = FracOrder.coerce(beta).beta
    if quadrature == "exact":
        return _pairings_exact(b, n)
    if quadrature == "gauss-legendre":
        return _pairings_gauss(b, n)
    raise ValueError(f"unknown quadrature {quadrature!r}")


def stiffness_matrix(beta, n: int, quadrature: str = "gauss-legendre") -> np.ndarray:
    b = FracOrder.coerce(beta).beta
    h = 1.0 / n
    m = interval_pairings(b, n, quadrature)
    k = np.arange(n)
    diff = k[None, :] - k[:, None]
    M = np.where(diff >= 0, m[np.clip(diff, 0, n - 1)], 0.0) * h ** (b + 1.0)
    E = np.zeros((n, n + 1))
    E[k, k] = -1.0 / h
    E[k, k + 1] = 1.0 / h
    return E.T @ M.T @ E


# }}}


# {{{ load vector


def _hat_moments(mu: float, n: int) -> np.ndarray:
    """``int x^mu φ_i dx`` for every hat on the uniform mesh."""
    h = 1.0 / n
    x = np.linspace(0.0, 1.0, n + 1)
    a, b = x[:-1], x[1:]
    A1 = (b ** (mu + 1.0) - a ** (mu + 1.0)) / (mu + 1.0)
    A2 = (b ** (mu + 2.0) - a ** (mu + 2.0)) / (mu + 2.0)
    rising = (A2 - a * A1) / h  # weight (x - a)/h on [a, b]
    falling = (b * A1 - A2) / h  # weight (b - x)/h on [a, b]
    out = np.zeros(n + 1)
    out[1:] += rising
    out[:-1] += falling
    return out


def _load_powersum(f: PowerSum, n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    for term in f:
        mom = _hat_moments(term.exponent, n)
        # substituting y = 1 - x maps hat i to hat n - i
        out += term.coef * (mom[::-1] if term.side is Side.RIGHT else mom)
    return out


def _load_grid(f: GridFunction, n: int) -> np.ndarray:
    h = 1.0 / n
    v = f.interpolate(np.linspace(0.0, 1.0, n + 1)) if f.n != n else f.values
    out = 4.0 * v
    out[1:] += v[:-1]
    out[:-1] += v[1:]
    out[0] -= 2.0 * v[0]
    out[-1] -= 2.0 * v[-1]
    return out * h / 6.0


# }}}


def assemble(beta, n: int, f, a0: float, a1: float, quadrature: str = "gauss-legendre") -> FemSystem:
    """Build the constrained Galerkin system on ``n`` uniform elements."""
    b = FracOrder.coerce(beta)
    n = int(n)
    if n < MIN_ELEMENTS:
        raise ValueError(f"need at least {MIN_ELEMENTS} elements, got {n}")
    if isinstance(f, (int, float)):
        f = PowerSum.constant(float(f))
    if isinstance(f, PowerSum):
        load = _load_powersum(f, n)
        f_scale = f.l1_bound()
    elif isinstance(f, GridFunction):
        load = _load_grid(f, n)
        f_scale = float(np.sum(np.abs(_load_grid(GridFunction(np.abs(f.values)), n))))
    else:
        raise TypeError("f must be a PowerSum or GridFunction")
    load[0] -= a0
    load[-1] += a1

    h = 1.0 / n
    c = np.full(n + 1, h)
    c[0] = c[-1] = 0.5 * h
    A = np.zeros((n + 2, n + 2))
    A[: n + 1, : n + 1] = stiffness_matrix(b, n, quadrature)
    A[: n + 1, n + 1] = c
    A[n + 1, : n + 1] = c
    rhs = np.concatenate([load, [0.0]])
    return FemSystem(b, n, A, rhs, max(abs(a0), abs(a1), f_scale))


def solve_fem(system: FemSystem, check: bool = True) -> GridFunction:
    """Nodal values of the mean-zero Galerkin solution.

    Raises
    ------
    IncompatibleData
        If the load has a nonzero constant-mode component, i.e. the data
        violate ``int f + a1 - a0 = 0``.
    SingularSystem
        If the factorization fails (should not happen for a coercive form).
    """
    if check:
        residual = float(np.sum(system.load))
        tol = scaled_tolerance(system.scale)
        if abs(residual) > tol:
            raise IncompatibleData(
                f"load not orthogonal to constants: residual {residual:.6g}", residual, tol
            )
    try:
        sol = np.linalg.solve(system.matrix, system.rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("non-finite solution")
    return GridFunction(sol[: system.n + 1])
