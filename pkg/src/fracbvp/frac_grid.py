"""Fractional integrals and derivatives on uniform grids of [0, 1].

The integral is the first-degree product-integration rule: the kernel
``(x_k - s)**(alpha - 1) / Gamma(alpha)`` is integrated exactly against the
piecewise-linear interpolant of the samples.  The rule is therefore exact
for piecewise-linear data and second order for smooth data.

Derivatives combine this integral with finite differences (centered in the
interior, second-order one-sided at the ends).  Grid functions never carry
the ``x**-beta`` singularity; that part lives in a :class:`PowerSum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import binom, roots_jacobi

from .special import FracOrder, PowerSum, Side, _as_side, gamma, pairing

__all__ = [
    "GridFunction",
    "INTERIOR_MARGIN",
    "frac_integral_grid",
    "caputo_derivative_grid",
    "rl_derivative_grid",
    "first_difference",
    "second_difference",
    "cumulative_trapezoid",
    "inner_product",
    "lp_norm",
    "trapezoid",
    "singular_pairing",
]

#: Nodes at each end of the grid where derivative-of-integral results are unreliable.
INTERIOR_MARGIN = 2

MIN_INTERVALS = 8

# weights for k - j >= _SERIES_FROM use a binomial series instead of power differences
_SERIES_FROM = 16
_SERIES_TERMS = 24


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[j] = g(j / n)`` on the uniform grid of ``[0, 1]``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < MIN_INTERVALS + 1:
            raise ValueError(
                f"a GridFunction needs at least {MIN_INTERVALS + 1} samples, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("GridFunction values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn: Callable, n: int) -> "GridFunction":
        x = np.linspace(0.0, 1.0, n + 1)
        return cls(np.broadcast_to(fn(x), x.shape))

    @classmethod
    def constant(cls, c: float, n: int) -> "GridFunction":
        return cls(np.full(n + 1, float(c)))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    def interpolate(self, x):
        """Piecewise-linear interpolant evaluated at ``x``."""
        return np.interp(x, self.x, self.values)

    __call__ = interpolate

    def __add__(self, other):
        if isinstance(other, GridFunction):
            _check_same_grid(self, other)
            return GridFunction(self.values + other.values)
        return GridFunction(self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            _check_same_grid(self, other)
            return GridFunction(self.values - other.values)
        return GridFunction(self.values - float(other))

    def __neg__(self):
        return GridFunction(-self.values)

    def __mul__(self, scalar):
        return GridFunction(float(scalar) * self.values)

    __rmul__ = __mul__

    def __repr__(self):
        return f"GridFunction(n={self.n})"


def _check_same_grid(a: GridFunction, b: GridFunction):
    if a.n != b.n:
        raise ValueError(f"grid mismatch: n={a.n} vs n={b.n}")


# {{{ product-trapezoid weights


def _product_weights(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``c[m]`` (interior node at distance m) and ``e[k]`` (node 0).

    ``I^alpha g(x_k) = h**alpha / Gamma(alpha + 2) *
    (e[k] g_0 + sum_{m=0}^{k-1} c[m] g_{k-m})``.
    """
    p = alpha + 1.0
    m = np.arange(n + 1, dtype=float)

    c = np.empty(n + 1)
    c[0] = 1.0
    mm = m[1:]
    small = mm < _SERIES_FROM
    direct = (mm + 1.0) ** p - 2.0 * mm**p + np.abs(mm - 1.0) ** p
    # (1+1/m)^p - 2 + (1-1/m)^p = 2 sum_k binom(p, 2k) m^(-2k)
    inv2 = np.where(small, 0.0, 1.0 / mm) ** 2
    series = np.zeros_like(mm)
    power = np.ones_like(mm)
    for k in range(1, _SERIES_TERMS // 2 + 1):
        power = power * inv2
        series += 2.0 * binom(p, 2 * k) * power
    c[1:] = np.where(small, direct, mm**p * series)

    e = np.zeros(n + 1)
    k = m[1:]
    small = k < _SERIES_FROM
    direct = np.abs(k - 1.0) ** p - (k - 1.0 - alpha) * k**alpha
    # (1-1/k)^p - (1 - p/k) = sum_{i>=2} binom(p, i) (-1/k)^i
    inv = np.where(small, 0.0, -1.0 / k)
    series = np.zeros_like(k)
    power = inv.copy()
    for i in range(2, _SERIES_TERMS + 1):
        power = power * inv
        series += binom(p, i) * power
    e[1:] = np.where(small, direct, k**p * series)
    return c, e


def _left_integral(values: np.ndarray, alpha: float) -> np.ndarray:
    n = values.size - 1
    h = 1.0 / n
    c, e = _product_weights(n, alpha)
    conv = np.convolve(c, values)[: n + 1]
    out = conv + (e - c) * values[0]
    out[0] = 0.0
    return out * (h**alpha / gamma(alpha + 2.0))


# }}}


def frac_integral_grid(side, alpha: float, g: GridFunction) -> GridFunction:
    """One-sided fractional integral of order ``alpha`` in (0, 1].

    Exact on piecewise-linear data; O(n**2) direct evaluation.
    """
    side = _as_side(side)
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if side is Side.LEFT:
        return GridFunction(_left_integral(g.values, alpha))
    return GridFunction(_left_integral(g.values[::-1], alpha)[::-1])


def first_difference(values: np.ndarray, h: float) -> np.ndarray:
    return np.gradient(values, h, edge_order=2)


def second_difference(values: np.ndarray, h: float) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h**2
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h**2
    return out


def _side_difference(values: np.ndarray, h: float, m: int, side: Side) -> np.ndarray:
    if m == 1:
        d = first_difference(values, h)
        return d if side is Side.LEFT else -d
    if m == 2:
        return second_difference(values, h)
    raise ValueError(f"derivative order m must be 1 or 2, got {m}")


def caputo_derivative_grid(side, beta, m: int, g: GridFunction) -> GridFunction:
    """Caputo derivative of order ``m - beta`` (``m`` in {1, 2}).

    Finite differences of order ``m`` followed by the product-trapezoid
    integral of order ``beta``.  Accuracy depends on the smoothness of
    ``g``, which is the caller's responsibility.
    """
    side = _as_side(side)
    b = FracOrder.coerce(beta).beta
    d = _side_difference(g.values, g.h, m, side)
    return frac_integral_grid(side, b, GridFunction(d))


def rl_derivative_grid(side, beta, m: int, g: GridFunction) -> GridFunction:
    """Riemann-Liouville derivative of order ``m - beta`` (``m`` in {1, 2}).

    The first and last :data:`INTERIOR_MARGIN` nodes are unreliable.
    """
    side = _as_side(side)
    b = FracOrder.coerce(beta).beta
    q = frac_integral_grid(side, b, g)
    return GridFunction(_side_difference(q.values, g.h, m, side))


# {{{ quadrature and norms


def trapezoid(values: np.ndarray, h: float) -> float:
    return float(np.trapezoid(values, dx=h))


def cumulative_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    """``x_k -> int_0^{x_k}`` of the piecewise-linear interpolant."""
    v = np.asarray(values, dtype=float)
    out = np.zeros_like(v)
    out[1:] = np.cumsum(0.5 * h * (v[1:] + v[:-1]))
    return out


def inner_product(g: GridFunction, h: GridFunction) -> float:
    _check_same_grid(g, h)
    return trapezoid(g.values * h.values, g.h)


def lp_norm(g: GridFunction, p: float) -> float:
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return trapezoid(np.abs(g.values) ** p, g.h) ** (1.0 / p)


def _jacobi_estimate(fn: Callable, beta: float, side: Side, nodes: int) -> float:
    # roots_jacobi weights (1-t)^a (1+t)^b on [-1, 1]; x = (1+t)/2
    if side is Side.RIGHT:
        t, w = roots_jacobi(nodes, -beta, 0.0)
    else:
        t, w = roots_jacobi(nodes, 0.0, -beta)
    x = 0.5 * (1.0 + t)
    return float(2.0 ** (beta - 1.0) * np.dot(w, fn(x)))


Source = Union[PowerSum, GridFunction, Callable]


def singular_pairing(
    f: Source,
    beta,
    side="right",
    nodes: int = 32,
    tol: float = 1e-10,
    max_nodes: int = 2048,
) -> float:
    """``int_0^1 f(x) (1-x)**-beta dx`` (``side="right"``) or with ``x**-beta``.

    Power sums are paired exactly.  Samples (through their piecewise-linear
    interpolant) and callables use Gauss-Jacobi quadrature, doubling the
    node count until two successive estimates agree to ``tol``.
    """
    side = _as_side(side)
    b = FracOrder.coerce(beta).beta
    if isinstance(f, PowerSum):
        return pairing(f, PowerSum.monomial(1.0, -b, side))
    fn = f.interpolate if isinstance(f, GridFunction) else f
    prev = _jacobi_estimate(fn, b, side, nodes)
    while nodes < max_nodes:
        nodes *= 2
        cur = _jacobi_estimate(fn, b, side, nodes)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    return prev


# }}}
