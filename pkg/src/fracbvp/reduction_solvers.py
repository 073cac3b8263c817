"""Constructive solvers for the well-posed cells and residual verification.

Every well-posed cell reduces to integrating the source once or twice and
applying a fractional integral:

=====================  ====================================================
cell                   construction (F(x) = int_0^x f)
=====================  ====================================================
Caputo / classical     u = c + a0 x - I^{2-β} f,        mean-zero u
conservative / Caputo  u = I^{1-β}(a0 - F) + c,         mean-zero u
conservative / RL      u = I^{1-β}(a0 - F)
RL / Caputo            u = I^{1-β}(a0 - F),             u(0) = 0
RL / RL                u = I^{1-β}(a0 - F) + w_f(0)/Γ(1-β) x^{-β},
                       w_f the mean-zero Neumann solution of -w'' = f
=====================  ====================================================

The Caputo / classical formula comes from applying D I^{1-β} (the
Riemann-Liouville derivative of order β) to both sides of
``-I^β D^2 u = f``: since ``D^β I^β = id`` this gives ``D^2 u = -D I^{1-β} f``,
and two integrations with ``Du(0) = a0`` give the formula.  ``Du(1) = a1``
then holds exactly when the weighted constraint does.  The residual report
confirms it independently by applying the forward operator.

Sources given as power sums stay in closed form throughout.  A sampled
source is split as ``f(0) + (f - f(0))``: the constant is carried exactly
and only the remainder, which vanishes at 0, goes through the
product-trapezoid grid operators.  This keeps the ``x^{1-β}`` and
``x^{2-β}`` behaviour of solutions near the origin off the grid.  The
``x**-β`` kernel is always kept symbolic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .errors import CaputoUndefined, IllPosedProblem, IncompatibleData
from .frac_grid import (
    INTERIOR_MARGIN,
    GridFunction,
    caputo_derivative_grid,
    cumulative_trapezoid,
    first_difference,
    frac_integral_grid,
    rl_derivative_grid,
    trapezoid,
)
from .special import (
    Derivative,
    PowerSum,
    Side,
    frac_derivative_exact,
    frac_integral_exact,
    gamma,
    integrate_unit,
)
from .wellposedness import (
    BcType,
    ConstraintKind,
    EquationForm,
    KERNEL_CONSTANT,
    KERNEL_SINGULAR,
    ProblemSpec,
    classify,
    compatibility_residual,
    constraint_tolerance,
    illposedness_certificate,
)

__all__ = [
    "Normalization",
    "ResidualReport",
    "Solution",
    "solve",
    "solve_caputo_classical",
    "solve_conserv_caputo_bc",
    "solve_conserv_rl_bc",
    "solve_rl_caputo_bc",
    "solve_rl_rl",
    "residual_report",
]

Profile = Union[PowerSum, GridFunction]

_C, _K, _R = EquationForm.CAPUTO, EquationForm.CONSERVATIVE, EquationForm.RIEMANN_LIOUVILLE
_NB, _CB, _RB = BcType.CLASSICAL, BcType.CAPUTO, BcType.RIEMANN_LIOUVILLE


class Normalization(str, Enum):
    MEAN_ZERO_U = "MeanZeroU"
    MEAN_ZERO_IBETA_U = "MeanZeroIBetaU"
    ANCHOR_U0 = "AnchorU0"
    NONE = "None"


@dataclass(frozen=True)
class ResidualReport:
    """How well a solution satisfies its equation, boundary data and gauge.

    ``bc_residual`` is signed (computed flux minus prescribed value); every
    other field is a magnitude.
    """

    interior_residual_sup: float
    bc_residual: tuple[float, float]
    constraint_residual: float
    normalization_residual: float

    def to_dict(self) -> dict:
        return {
            "interior_residual_sup": self.interior_residual_sup,
            "bc_residual": list(self.bc_residual),
            "constraint_residual": self.constraint_residual,
            "normalization_residual": self.normalization_residual,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualReport":
        return cls(
            float(d["interior_residual_sup"]),
            (float(d["bc_residual"][0]), float(d["bc_residual"][1])),
            float(d["constraint_residual"]),
            float(d["normalization_residual"]),
        )


@dataclass(frozen=True)
class Solution:
    """``u = regular_part + singular_part``.

    ``singular_part`` only ever holds a multiple of ``x**-β``.  ``kernel``
    describes the non-uniqueness family (``None`` when unique).  For a
    sampled ``regular_part``, ``closed_part`` is the closed-form component
    already included in the samples; the verifier treats it exactly.
    """

    form: EquationForm
    bc: BcType
    beta: float
    regular_part: Profile
    singular_part: PowerSum = field(default_factory=PowerSum)
    kernel: str | None = None
    normalization: Normalization = Normalization.NONE
    report: ResidualReport | None = None
    closed_part: PowerSum = field(default_factory=PowerSum)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.regular_part, PowerSum)

    @property
    def singular_coefficient(self) -> float:
        """Coefficient ``C`` of ``C x**-β`` in the singular part."""
        return self.singular_part.coefficient(-self.beta)

    def regular(self, x):
        return self.regular_part(x)

    def __call__(self, x):
        """Full solution; infinite at x = 0 if a singular part is present."""
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.regular_part(x), dtype=float)
        if not self.singular_part.is_zero():
            out = out + self.singular_part(x)
        return out if out.ndim else float(out)

    def with_report(self, report: ResidualReport) -> "Solution":
        return Solution(
            self.form, self.bc, self.beta, self.regular_part, self.singular_part,
            self.kernel, self.normalization, report, self.closed_part,
        )


# {{{ hybrid profiles


@dataclass(frozen=True)
class _Hybrid:
    """``closed + grid``: a power sum plus (optionally) samples.

    Sampled sources are split as ``f(0) + (f - f(0))`` so that the leading
    ``x^{1-β}`` / ``x^{2-β}`` behaviour of the solution stays in closed form
    and only a smoother remainder is discretized.
    """

    closed: PowerSum
    grid: GridFunction | None = None

    def _combine(self, other, sign):
        if isinstance(other, (int, float)):
            return _Hybrid(self.closed + sign * float(other), self.grid)
        g = self.grid
        if other.grid is not None:
            g = sign * other.grid if g is None else (g + other.grid if sign > 0 else g - other.grid)
        return _Hybrid(self.closed + sign * other.closed, g)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return _Hybrid(-self.closed, None if self.grid is None else -self.grid)

    def frac_int(self, alpha: float) -> "_Hybrid":
        g = None if self.grid is None else frac_integral_grid(Side.LEFT, alpha, self.grid)
        return _Hybrid(frac_integral_exact(Side.LEFT, alpha, self.closed), g)

    def cumint(self) -> "_Hybrid":
        g = None if self.grid is None else GridFunction(cumulative_trapezoid(self.grid.values, self.grid.h))
        return _Hybrid(self.closed.cumulative_integral(), g)

    def mean(self) -> float:
        m = integrate_unit(self.closed)
        return m if self.grid is None else m + trapezoid(self.grid.values, self.grid.h)

    def at_zero(self) -> float:
        v = float(self.closed(0.0)) if not self.closed.is_zero() else 0.0
        return v if self.grid is None else v + float(self.grid.values[0])

    def regular(self) -> Profile:
        if self.grid is None:
            return self.closed
        return GridFunction(self.grid.values + self.closed(self.grid.x))


def _hybrid_source(spec: ProblemSpec) -> _Hybrid:
    if spec.is_exact:
        return _Hybrid(spec.f)
    f = spec.sampled().f
    f0 = float(f.values[0])
    return _Hybrid(PowerSum.constant(f0), f - f0)


def _linear(a: float, b: float) -> _Hybrid:
    return _Hybrid(PowerSum.from_pairs([(a, 0.0), (b, 1.0)]))


def _flux_slope(spec: ProblemSpec, f: _Hybrid) -> _Hybrid:
    """``a0 - int_0^x f``: the unique slope / flux profile of the reductions."""
    return _linear(spec.a0, 0.0) - f.cumint()


def _make(spec: ProblemSpec, u: _Hybrid, singular=None, kernel=None,
          normalization=Normalization.NONE) -> Solution:
    closed = PowerSum() if u.grid is None else u.closed
    return Solution(spec.form, spec.bc, spec.beta.beta, u.regular(),
                    singular if singular is not None else PowerSum(), kernel,
                    normalization, None, closed)


def _check_constraint(spec: ProblemSpec, kind: ConstraintKind, residual: float | None = None):
    if residual is None:
        residual = compatibility_residual(spec, kind)
    tol = constraint_tolerance(spec)
    if abs(residual) > tol:
        raise IncompatibleData(
            f"{spec.form.value}/{spec.bc.value}: {kind.value} constraint violated "
            f"(residual {residual:.6g}, tolerance {tol:.3g})",
            residual,
            tol,
        )
    return residual


def _weighted_a0_zero(spec: ProblemSpec) -> float:
    """``<f, (1-x)^-β> + Γ(1-β) a1``: the weighted constraint with a0 = 0."""
    return compatibility_residual(spec.replace(a0=0.0), ConstraintKind.WEIGHTED)


# }}}


# {{{ well-posed cells


def solve_caputo_classical(spec: ProblemSpec) -> Solution:
    """Caputo equation with classical Neumann data, mean-zero representative."""
    _check_constraint(spec, ConstraintKind.WEIGHTED)
    f = _hybrid_source(spec)
    u = _linear(0.0, spec.a0) - f.frac_int(spec.beta.order1).frac_int(1.0)
    u = u - u.mean()
    return _make(spec, u, None, KERNEL_CONSTANT, Normalization.MEAN_ZERO_U)


def solve_conserv_caputo_bc(spec: ProblemSpec) -> Solution:
    """Conservative Caputo equation with Caputo Neumann data.

    ``w = a0 - F`` solves the reduced Dirichlet problem ``-w'' = Df``,
    ``w(0) = a0``, ``w(1) = a1`` without differentiating ``f``.
    """
    _check_constraint(spec, ConstraintKind.PLAIN)
    u = _flux_slope(spec, _hybrid_source(spec)).frac_int(spec.beta.order1)
    u = u - u.mean()
    return _make(spec, u, None, KERNEL_CONSTANT, Normalization.MEAN_ZERO_U)


def solve_rl_rl(spec: ProblemSpec) -> Solution:
    """Riemann-Liouville equation with Riemann-Liouville Neumann data.

    ``w_f`` is the mean-zero classical Neumann solution of ``-w'' = f``;
    the result is ``I^{1-β} w_f' + w_f(0)/Γ(1-β) x^{-β}``, the
    representative with ``int_0^1 I^β u = 0``.  Any multiple of ``x**-β``
    may be added.
    """
    _check_constraint(spec, ConstraintKind.PLAIN)
    slope = _flux_slope(spec, _hybrid_source(spec))
    w = slope.cumint()
    w0 = -w.mean()  # w(0) = 0 before mean removal
    singular = PowerSum.monomial(w0 / gamma(spec.beta.order1), -spec.beta.beta)
    return _make(spec, slope.frac_int(spec.beta.order1), singular, KERNEL_SINGULAR,
                 Normalization.MEAN_ZERO_IBETA_U)


def solve_rl_caputo_bc(spec: ProblemSpec) -> Solution:
    """Riemann-Liouville equation with Caputo Neumann data; ``u(0) = 0``."""
    _check_constraint(spec, ConstraintKind.PLAIN)
    u = _flux_slope(spec, _hybrid_source(spec)).frac_int(spec.beta.order1)
    return _make(spec, u, None, None, Normalization.ANCHOR_U0)


def solve_conserv_rl_bc(spec: ProblemSpec) -> Solution:
    """Conservative Caputo equation with Riemann-Liouville Neumann data.

    ``u = I^{1-β} w'`` with ``w`` the classical Neumann solution; only the
    unique slope ``w' = a0 - F`` enters.
    """
    _check_constraint(spec, ConstraintKind.PLAIN)
    u = _flux_slope(spec, _hybrid_source(spec)).frac_int(spec.beta.order1)
    return _make(spec, u, None, None, Normalization.NONE)


# }}}


# {{{ a0 = 0 special cases of the ill-posed cells


def _special_case(spec: ProblemSpec) -> Solution:
    f = _hybrid_source(spec)
    particular = -f.frac_int(spec.beta.order1).frac_int(1.0)
    if spec.cell == (_K, _NB):
        _check_constraint(spec, ConstraintKind.WEIGHTED, _weighted_a0_zero(spec))
        u = particular - particular.mean()
        return _make(spec, u, None, KERNEL_CONSTANT, Normalization.MEAN_ZERO_U)
    if spec.cell == (_R, _NB):
        _check_constraint(spec, ConstraintKind.WEIGHTED, _weighted_a0_zero(spec))
        return _make(spec, particular)
    # flux of C0 x - I^{2-β} f at x = 1 is C0/Γ(1+β) - int f for both flux types
    c0 = gamma(1.0 + spec.beta.beta) * (spec.a1 + f.mean())
    u = _linear(0.0, c0) + particular
    if spec.bc is _CB:
        u = u - u.mean()
        return _make(spec, u, None, KERNEL_CONSTANT, Normalization.MEAN_ZERO_U)
    return _make(spec, u)


# }}}


_SOLVERS = {
    (_C, _NB): solve_caputo_classical,
    (_K, _CB): solve_conserv_caputo_bc,
    (_K, _RB): solve_conserv_rl_bc,
    (_R, _CB): solve_rl_caputo_bc,
    (_R, _RB): solve_rl_rl,
}


def solve(spec: ProblemSpec, report: bool = True) -> Solution:
    """Solve ``spec`` by the reduction for its cell.

    Raises
    ------
    IllPosedProblem
        For an ill-posed cell with ``a0 != 0``.  With ``a0 = 0`` the
        special-case solution is constructed instead.
    IncompatibleData
        When the cell's compatibility constraint fails beyond the scaled
        tolerance.
    """
    verdict = classify(spec.form, spec.bc)
    if verdict.well_posed:
        sol = _SOLVERS[spec.cell](spec)
    else:
        cert = illposedness_certificate(spec)
        if not cert.special_case:
            raise IllPosedProblem(
                f"{spec.form.value}/{spec.bc.value} admits no solution for a0 = {spec.a0:g}",
                cert,
            )
        sol = _special_case(spec)
    if report:
        sol = sol.with_report(residual_report(sol, spec))
    return sol


# {{{ residual verification


def _constraint_value(sol: Solution, spec: ProblemSpec) -> float:
    verdict = classify(sol.form, sol.bc)
    if verdict.constraint_kind is not ConstraintKind.NONE:
        return abs(compatibility_residual(spec))
    if sol.bc is _NB:
        return abs(_weighted_a0_zero(spec))
    return 0.0


def _interior_nodes(n: int) -> np.ndarray:
    return np.arange(INTERIOR_MARGIN, n - INTERIOR_MARGIN + 1) / n


def _exact_operator(form: EquationForm, b: float, u: PowerSum) -> PowerSum:
    if form is _C:
        return -frac_derivative_exact(Derivative.CAPUTO, Side.LEFT, 2.0 - b, u)
    if form is _K:
        return -frac_derivative_exact(Derivative.CAPUTO, Side.LEFT, 1.0 - b, u).derivative()
    return -frac_derivative_exact(Derivative.RIEMANN_LIOUVILLE, Side.LEFT, 2.0 - b, u)


def _exact_flux(bc: BcType, b: float, u: PowerSum) -> PowerSum:
    if bc is _NB:
        return u.derivative()
    if bc is _CB:
        return frac_derivative_exact(Derivative.CAPUTO, Side.LEFT, 1.0 - b, u)
    return frac_derivative_exact(Derivative.RIEMANN_LIOUVILLE, Side.LEFT, 1.0 - b, u)


def _grid_operator(form: EquationForm, b: float, u: GridFunction) -> np.ndarray:
    if form is _C:
        return -caputo_derivative_grid(Side.LEFT, b, 2, u).values
    if form is _K:
        flux = caputo_derivative_grid(Side.LEFT, b, 1, u).values
        return -first_difference(flux, u.h)
    return -rl_derivative_grid(Side.LEFT, b, 2, u).values


def _grid_flux_ends(bc: BcType, b: float, u: GridFunction) -> tuple[float, float]:
    if bc is _NB:
        d = first_difference(u.values, u.h)
        return float(d[0]), float(d[-1])
    if bc is _CB:
        q = caputo_derivative_grid(Side.LEFT, b, 1, u).values
        # the discrete integral vanishes identically at x = 0; extrapolate from nodes 1, 2
        return float(2.0 * q[1] - q[2]), float(q[-1])
    q = rl_derivative_grid(Side.LEFT, b, 1, u).values
    return float(q[0]), float(q[-1])


def _split(sol: Solution) -> _Hybrid:
    u = sol.regular_part
    if isinstance(u, PowerSum):
        return _Hybrid(u)
    c = sol.closed_part
    return _Hybrid(c, GridFunction(u.values - c(u.x)) if not c.is_zero() else u)


def _normalization_value(sol: Solution) -> float:
    u = _split(sol)
    if sol.normalization is Normalization.MEAN_ZERO_U:
        return abs(u.mean())
    if sol.normalization is Normalization.MEAN_ZERO_IBETA_U:
        singular = frac_integral_exact(Side.LEFT, sol.beta, sol.singular_part)
        return abs(u.frac_int(sol.beta).mean() + integrate_unit(singular))
    if sol.normalization is Normalization.ANCHOR_U0:
        return abs(u.at_zero())
    return 0.0


def residual_report(sol: Solution, spec: ProblemSpec) -> ResidualReport:
    """Apply the cell's forward operator and flux functionals to ``sol``.

    Closed-form solutions are checked exactly on the interior nodes of the
    ``spec.n`` grid.  Sampled solutions use the grid operators, skipping
    :data:`INTERIOR_MARGIN` nodes at each end, while their closed-form and
    singular components are differentiated exactly.  A residual the
    operator cannot produce (a divergent Caputo integral) is reported as
    ``inf``.
    """
    b = sol.beta
    a0, a1 = spec.a0, spec.a1
    u = _split(sol)
    exact = u.closed + sol.singular_part

    if u.grid is None and spec.is_exact:
        xs = _interior_nodes(spec.n)
        try:
            res = _exact_operator(sol.form, b, exact) - spec.f
            interior = float(np.max(np.abs(res(xs))))
        except CaputoUndefined:
            interior = math.inf
        try:
            flux = _exact_flux(sol.bc, b, exact)
            bc = (float(flux(0.0)) - a0, float(flux(1.0)) - a1)
        except CaputoUndefined:
            bc = (math.inf, math.inf)
    else:
        g = u.grid if u.grid is not None else GridFunction.from_function(u.closed, spec.n)
        if u.grid is None:
            exact = sol.singular_part
        n = g.n
        f = spec.sampled(n).f
        lu = _grid_operator(sol.form, b, g)
        flux0, flux1 = _grid_flux_ends(sol.bc, b, g)
        m = INTERIOR_MARGIN
        xs = g.x[m : n - m + 1]
        lu = lu[m : n - m + 1]
        try:
            if not exact.is_zero():
                lu = lu + _exact_operator(sol.form, b, exact)(xs)
                sflux = _exact_flux(sol.bc, b, exact)
                flux0 += float(sflux(0.0)) if not sflux.is_zero() else 0.0
                flux1 += float(sflux(1.0)) if not sflux.is_zero() else 0.0
            interior = float(np.max(np.abs(lu - f.values[m : n - m + 1])))
            bc = (flux0 - a0, flux1 - a1)
        except CaputoUndefined:
            interior, bc = math.inf, (math.inf, math.inf)

    return ResidualReport(
        interior_residual_sup=interior,
        bc_residual=bc,
        constraint_residual=_constraint_value(sol, spec),
        normalization_residual=_normalization_value(sol),
    )


# }}}
