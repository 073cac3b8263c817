"""Integer-order two-point problems ``-w'' = g`` on (0, 1).

Both problems are integrated directly (twice for the profile), so no
linear system is formed.  Power-sum sources are solved exactly by
term-wise antidifferentiation; sampled sources use cumulative trapezoid
sums on their own grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import IncompatibleData
from .frac_grid import GridFunction, cumulative_trapezoid, trapezoid
from .special import PowerSum, integrate_unit
from .tolerances import scaled_tolerance

__all__ = [
    "Representative",
    "ClassicalSolution",
    "solve_dirichlet",
    "solve_neumann",
    "neumann_residual",
    "mean_zero_normalize",
    "mean_value",
]

Source = Union[PowerSum, GridFunction, float, int]


class Representative(str, Enum):
    MEAN_ZERO = "MeanZero"
    ANCHORED_AT_ZERO = "AnchoredAtZero"
    RAW = "Raw"


@dataclass(frozen=True)
class ClassicalSolution:
    """Profile ``w``, its slope ``w'``, and the compatibility residual."""

    w: Union[PowerSum, GridFunction]
    slope: Union[PowerSum, GridFunction]
    representative: Representative
    compat_residual: float = 0.0


def _coerce_source(g: Source, n: int | None):
    if isinstance(g, (PowerSum, GridFunction)):
        return g
    if isinstance(g, (int, float, np.floating)):
        if n is None:
            return PowerSum.constant(float(g))
        return GridFunction.constant(float(g), n)
    raise TypeError(f"unsupported source type {type(g).__name__}")


def _antiderivative(g):
    if isinstance(g, PowerSum):
        return g.cumulative_integral()
    return GridFunction(cumulative_trapezoid(g.values, g.h))


def _integral(g) -> float:
    if isinstance(g, PowerSum):
        return integrate_unit(g)
    return trapezoid(g.values, g.h)


def _l1(g) -> float:
    if isinstance(g, PowerSum):
        return g.l1_bound()
    return trapezoid(np.abs(g.values), g.h)


def _value_at(w, x: float) -> float:
    if isinstance(w, PowerSum):
        return float(w(x))
    return float(w.values[0] if x == 0.0 else w.values[-1])


def _linear(a: float, b: float, like):
    """``a + b x`` in the representation of ``like``."""
    if isinstance(like, PowerSum):
        return PowerSum.from_pairs([(a, 0.0), (b, 1.0)])
    return GridFunction(a + b * like.x)


def mean_value(g) -> float:
    return _integral(g)


def mean_zero_normalize(g):
    """Subtract the mean over (0, 1); idempotent."""
    if isinstance(g, PowerSum):
        return g - integrate_unit(g)
    return GridFunction(g.values - trapezoid(g.values, g.h))


def solve_dirichlet(g: Source, d0: float, d1: float, n: int | None = None) -> ClassicalSolution:
    """Solve ``-w'' = g`` with ``w(0) = d0`` and ``w(1) = d1``.

    Always solvable.  ``n`` is only used when ``g`` is a bare number and a
    sampled answer is wanted.
    """
    g = _coerce_source(g, n)
    G = _antiderivative(_antiderivative(g))
    W1 = _value_at(G, 1.0)
    w = _linear(d0, d1 - d0 + W1, G) - G
    slope = _linear(d1 - d0 + W1, 0.0, G) - _antiderivative(g)
    return ClassicalSolution(w, slope, Representative.RAW, 0.0)


def neumann_residual(g: Source, n0: float, n1: float) -> float:
    """``int g + n1 - n0``, which must vanish for ``-w'' = g`` to be solvable."""
    return _integral(_coerce_source(g, None)) + float(n1) - float(n0)


def solve_neumann(
    g: Source,
    n0: float,
    n1: float,
    n: int | None = None,
    representative: Representative = Representative.MEAN_ZERO,
    tol: float | None = None,
) -> ClassicalSolution:
    """Solve ``-w'' = g`` with ``w'(0) = n0`` and ``w'(1) = n1``.

    The slope is unique; the profile is fixed up to a constant and returned
    as the mean-zero representative unless ``representative`` says
    otherwise.

    Raises
    ------
    IncompatibleData
        If ``int g + n1 - n0`` exceeds the tolerance scaled by
        ``max(1, |n0|, |n1|, ||g||_1)``.
    """
    g = _coerce_source(g, n)
    residual = _integral(g) + float(n1) - float(n0)
    if tol is None:
        tol = scaled_tolerance(n0, n1, _l1(g))
    if abs(residual) > tol:
        raise IncompatibleData(
            f"Neumann data incompatible: int g + n1 - n0 = {residual:.6g}", residual, tol
        )
    slope = _linear(float(n0), 0.0, g) - _antiderivative(g)
    w = _antiderivative(slope)
    representative = Representative(representative)
    if representative is Representative.MEAN_ZERO:
        w = mean_zero_normalize(w)
    return ClassicalSolution(w, slope, representative, residual)
