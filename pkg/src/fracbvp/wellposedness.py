"""Classification of the nine equation / Neumann-condition combinations.

Three equation forms of order ``2 - beta`` on (0, 1)::

    Caputo (non-conservative)   -I^beta D^2 u       = f
    conservative Caputo         -D (I^beta D u)      = f
    Riemann-Liouville           -D^2 (I^beta u)      = f

are paired with classical (``Du``), Caputo (``I^beta Du``) or
Riemann-Liouville (``D I^beta u``) flux data ``a0`` at x=0 and ``a1`` at
x=1.  Five pairs are well posed (possibly up to a kernel), four are not.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .errors import CertificateUnavailable
from .frac_grid import GridFunction, singular_pairing, trapezoid
from .special import (
    Derivative,
    FracOrder,
    PowerSum,
    Side,
    frac_derivative_exact,
    gamma,
    integrate_unit,
)
from .tolerances import scaled_tolerance

__all__ = [
    "EquationForm",
    "BcType",
    "Status",
    "ConstraintKind",
    "ProblemSpec",
    "Verdict",
    "Certificate",
    "KERNEL_CONSTANT",
    "KERNEL_SINGULAR",
    "classify",
    "classification_table",
    "verdict_for",
    "compatibility_residual",
    "constraint_tolerance",
    "illposedness_certificate",
]

KERNEL_CONSTANT = "additive constant"
KERNEL_SINGULAR = "C·x^{−β}"


class EquationForm(str, Enum):
    CAPUTO = "CaputoNonConservative"
    CONSERVATIVE = "ConservativeCaputo"
    RIEMANN_LIOUVILLE = "RiemannLiouville"


class BcType(str, Enum):
    CLASSICAL = "ClassicalNeumann"
    CAPUTO = "CaputoNeumann"
    RIEMANN_LIOUVILLE = "RiemannLiouvilleNeumann"


class Status(str, Enum):
    UP_TO_CONSTANT = "WellPosedUpToConstant"
    UP_TO_SINGULAR_KERNEL = "WellPosedUpToSingularKernel"
    UNIQUE = "UniqueSolution"
    ILL_POSED = "IllPosedInGeneral"


class ConstraintKind(str, Enum):
    WEIGHTED = "WeightedPairing"
    PLAIN = "PlainIntegral"
    NONE = "None"


_FORM_ALIASES = {
    "caputo": EquationForm.CAPUTO,
    "caputononconservative": EquationForm.CAPUTO,
    "conservative": EquationForm.CONSERVATIVE,
    "conservativecaputo": EquationForm.CONSERVATIVE,
    "conserv": EquationForm.CONSERVATIVE,
    "rl": EquationForm.RIEMANN_LIOUVILLE,
    "riemannliouville": EquationForm.RIEMANN_LIOUVILLE,
}

_BC_ALIASES = {
    "classical": BcType.CLASSICAL,
    "classicalneumann": BcType.CLASSICAL,
    "neumann": BcType.CLASSICAL,
    "caputo": BcType.CAPUTO,
    "caputoneumann": BcType.CAPUTO,
    "caputon": BcType.CAPUTO,
    "rl": BcType.RIEMANN_LIOUVILLE,
    "riemannliouville": BcType.RIEMANN_LIOUVILLE,
    "riemannliouvilleneumann": BcType.RIEMANN_LIOUVILLE,
    "rln": BcType.RIEMANN_LIOUVILLE,
}


def _key(s: str) -> str:
    return "".join(ch for ch in str(s).lower() if ch.isalnum())


def parse_form(value) -> EquationForm:
    if isinstance(value, EquationForm):
        return value
    try:
        return _FORM_ALIASES[_key(value)]
    except KeyError:
        raise ValueError(f"unknown equation form {value!r}") from None


def parse_bc(value) -> BcType:
    if isinstance(value, BcType):
        return value
    try:
        return _BC_ALIASES[_key(value)]
    except KeyError:
        raise ValueError(f"unknown boundary condition {value!r}") from None


Source = Union[PowerSum, GridFunction]


@dataclass(frozen=True)
class ProblemSpec:
    """One boundary-value problem: equation, boundary data, source, resolution."""

    form: EquationForm
    bc: BcType
    beta: FracOrder
    f: Source
    a0: float = 0.0
    a1: float = 0.0
    n: int = 256

    def __post_init__(self):
        object.__setattr__(self, "form", parse_form(self.form))
        object.__setattr__(self, "bc", parse_bc(self.bc))
        object.__setattr__(self, "beta", FracOrder.coerce(self.beta))
        f = self.f
        if isinstance(f, (int, float)):
            f = PowerSum.constant(float(f))
        if not isinstance(f, (PowerSum, GridFunction)):
            raise TypeError("f must be a PowerSum or GridFunction")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a1", float(self.a1))
        n = int(self.f.n) if isinstance(f, GridFunction) else int(self.n)
        if n < 8:
            raise ValueError(f"n must be at least 8, got {n}")
        object.__setattr__(self, "n", n)
        if not (np.isfinite(self.a0) and np.isfinite(self.a1)):
            raise ValueError("boundary data must be finite")

    @property
    def cell(self) -> tuple[EquationForm, BcType]:
        return (self.form, self.bc)

    @property
    def is_exact(self) -> bool:
        """True when ``f`` is a power sum the exact operators can handle."""
        return isinstance(self.f, PowerSum) and Side.RIGHT not in self.f.sides()

    def sampled(self, n: int | None = None) -> "ProblemSpec":
        """Same problem with ``f`` sampled (or resampled) on ``n`` intervals."""
        n = self.n if n is None else int(n)
        if isinstance(self.f, GridFunction):
            if self.f.n == n:
                return self
            x = np.linspace(0.0, 1.0, n + 1)
            g = GridFunction(self.f.interpolate(x))
        else:
            g = GridFunction.from_function(self.f, n)
        return dataclasses.replace(self, f=g, n=n)

    def replace(self, **changes) -> "ProblemSpec":
        return dataclasses.replace(self, **changes)

    def f_l1(self) -> float:
        if isinstance(self.f, PowerSum):
            return self.f.l1_bound()
        return trapezoid(np.abs(self.f.values), self.f.h)


@dataclass(frozen=True)
class Verdict:
    form: EquationForm
    bc: BcType
    status: Status
    kernel: str | None
    constraint_kind: ConstraintKind
    constraint_residual: float | None = None
    certificate: str = ""

    @property
    def well_posed(self) -> bool:
        return self.status is not Status.ILL_POSED

    def to_dict(self) -> dict:
        return {
            "form": self.form.value,
            "bc": self.bc.value,
            "status": self.status.value,
            "well_posed": self.well_posed,
            "kernel": self.kernel,
            "constraint_kind": self.constraint_kind.value,
            "constraint_residual": self.constraint_residual,
            "certificate": self.certificate,
        }


@dataclass(frozen=True)
class Certificate:
    """Why a cell fails for the given data.

    ``special_case`` is set when ``a0 = 0``, the only data for which a solution
    can exist; the solver still checks any remaining compatibility condition.
    """

    form: EquationForm
    bc: BcType
    text: str
    special_case: bool
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "form": self.form.value,
            "bc": self.bc.value,
            "text": self.text,
            "special_case": self.special_case,
            "data": self.data,
        }


_C, _K, _R = EquationForm.CAPUTO, EquationForm.CONSERVATIVE, EquationForm.RIEMANN_LIOUVILLE
_NB, _CB, _RB = BcType.CLASSICAL, BcType.CAPUTO, BcType.RIEMANN_LIOUVILLE

_ILL_TEXT = {
    (_C, _CB): (
        "Every solution of the Caputo equation is C1 + C0 x - I^{2-β} f; its Caputo flux "
        "I^β Du vanishes at x = 0, so the data are unattainable unless a0 = 0."
    ),
    (_C, _RB): (
        "Every solution of the Caputo equation is C1 + C0 x - I^{2-β} f; a finite "
        "Riemann-Liouville flux D I^β u at x = 0 forces C1 = 0 and then vanishes, so the "
        "data are unattainable unless a0 = 0. (The unique-solution result for "
        "Riemann-Liouville flux data belongs to the conservative form.)"
    ),
    (_K, _NB): (
        "w = Du solves an inhomogeneous Dirichlet problem for the Riemann-Liouville "
        "operator of order 2-β with w(0) = a0, w(1) = a1; lifting the data produces the "
        "forcing f_b whose x^{β-2} term, with coefficient a0(β-1)/Γ(β), is not in "
        "H^{-(1-β/2)}. Solvable if and only if a0 = 0."
    ),
    (_R, _NB): (
        "Every solution of the Riemann-Liouville equation is "
        "C1 x^{-β}/Γ(1-β) + C0 x^{1-β}/Γ(2-β) - I^{2-β} f, so Du ~ C0/(Γ(1-β) x^β) near "
        "x = 0; a finite Du(0) forces C0 = C1 = 0 and then Du(0) = 0, so the data are "
        "unattainable unless a0 = 0."
    ),
}

_TABLE = {
    (_C, _NB): (Status.UP_TO_CONSTANT, KERNEL_CONSTANT, ConstraintKind.WEIGHTED),
    (_C, _CB): (Status.ILL_POSED, None, ConstraintKind.NONE),
    (_C, _RB): (Status.ILL_POSED, None, ConstraintKind.NONE),
    (_K, _NB): (Status.ILL_POSED, None, ConstraintKind.NONE),
    (_K, _CB): (Status.UP_TO_CONSTANT, KERNEL_CONSTANT, ConstraintKind.PLAIN),
    (_K, _RB): (Status.UNIQUE, None, ConstraintKind.PLAIN),
    (_R, _NB): (Status.ILL_POSED, None, ConstraintKind.NONE),
    (_R, _CB): (Status.UNIQUE, None, ConstraintKind.PLAIN),
    (_R, _RB): (Status.UP_TO_SINGULAR_KERNEL, KERNEL_SINGULAR, ConstraintKind.PLAIN),
}


def classify(form, bc) -> Verdict:
    """Data-free verdict for one cell of the table."""
    form, bc = parse_form(form), parse_bc(bc)
    status, kernel, kind = _TABLE[(form, bc)]
    return Verdict(form, bc, status, kernel, kind, None, _ILL_TEXT.get((form, bc), ""))


def classification_table() -> list[Verdict]:
    """All nine verdicts, equation-major."""
    return [classify(form, bc) for form in EquationForm for bc in BcType]


def _weighted_pairing(spec: ProblemSpec) -> float:
    f = spec.f
    if isinstance(f, PowerSum) and not spec.is_exact:
        f = spec.sampled().f
    return singular_pairing(f, spec.beta, Side.RIGHT)


def _plain_integral(spec: ProblemSpec) -> float:
    if spec.is_exact:
        return integrate_unit(spec.f)
    g = spec.sampled().f
    return trapezoid(g.values, g.h)


def compatibility_residual(spec: ProblemSpec, kind: ConstraintKind | None = None) -> float:
    """Signed solvability residual of the cell's constraint.

    WeightedPairing: ``<f, (1-x)^-β> + Γ(1-β)(a1 - a0)``;
    PlainIntegral: ``<f, 1> + a1 - a0``.
    """
    if kind is None:
        kind = classify(spec.form, spec.bc).constraint_kind
    kind = ConstraintKind(kind)
    if kind is ConstraintKind.WEIGHTED:
        return _weighted_pairing(spec) + gamma(spec.beta.order1) * (spec.a1 - spec.a0)
    if kind is ConstraintKind.PLAIN:
        return _plain_integral(spec) + spec.a1 - spec.a0
    raise ValueError(f"cell {spec.form.value}/{spec.bc.value} carries no compatibility constraint")


def constraint_tolerance(spec: ProblemSpec) -> float:
    return scaled_tolerance(spec.a0, spec.a1, spec.f_l1())


def verdict_for(spec: ProblemSpec) -> Verdict:
    """Cell verdict with the constraint residual evaluated for ``spec``."""
    v = classify(spec.form, spec.bc)
    if v.constraint_kind is ConstraintKind.NONE:
        return v
    return dataclasses.replace(v, constraint_residual=compatibility_residual(spec))


# {{{ certificates


def _terms_payload(p: PowerSum) -> list[dict]:
    return p.to_list()


def illposedness_certificate(spec: ProblemSpec) -> Certificate:
    """Data-specific obstruction for an ill-posed cell.

    Raises
    ------
    CertificateUnavailable
        If the cell is well posed.
    """
    v = classify(spec.form, spec.bc)
    if v.well_posed:
        raise CertificateUnavailable(
            f"{spec.form.value}/{spec.bc.value} is well posed; no certificate exists"
        )
    beta = spec.beta.beta
    a0, a1 = spec.a0, spec.a1
    zero_a0 = abs(a0) <= constraint_tolerance(spec)
    data: dict = {"a0": a0, "a1": a1, "beta": beta, "condition": "a0 == 0"}

    if spec.cell == (_K, _NB):
        # lifting w_b = a0 (1 - x) + a1 x; f_b = D^2 I^β w_b
        w_b = PowerSum.from_pairs([(a0, 0.0), (a1 - a0, 1.0)])
        f_b = frac_derivative_exact(Derivative.RIEMANN_LIOUVILLE, Side.LEFT, 2.0 - beta, w_b)
        obstruction = f_b.coefficient(beta - 2.0)
        data.update(
            f_b=_terms_payload(f_b),
            obstruction_coefficient=obstruction,
            obstruction_exponent=beta - 2.0,
        )
        text = v.certificate + f" Here the obstruction coefficient is {obstruction:.12g}."
    elif spec.form is _C:
        data["boundary_flux_at_zero"] = 0.0
        text = v.certificate
    else:
        # Du of the homogeneous family near 0: C0 x^-β / Γ(1-β) + C1 x^{-1-β} / Γ(-β)
        data["du_homogeneous_family"] = {
            "C0": {"coef": 1.0 / gamma(1.0 - beta), "exponent": -beta},
            "C1": {"coef": 1.0 / gamma(-beta), "exponent": -1.0 - beta},
        }
        text = v.certificate

    if zero_a0:
        text += " These data have a0 = 0, the special case in which a solution can exist."
    data["a0_is_zero"] = zero_a0
    return Certificate(spec.form, spec.bc, text, zero_a0, data)


# }}}
