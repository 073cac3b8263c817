"""Special functions and exact fractional calculus on power terms.

A :class:`PowerSum` is a finite sum ``sum_i c_i x**mu_i`` (left-anchored
terms) and/or ``sum_j d_j (1 - x)**nu_j`` (right-anchored terms).  The
fractional integral of a single power is again a power,

    I_0^alpha x**mu = Gamma(mu + 1) / Gamma(alpha + mu + 1) * x**(alpha + mu),

so every operator in this module is exact up to floating point.  The rest
of the package uses these routines as the ground truth for the grid
discretizations and as the carrier of closed-form solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import CaputoUndefined, MixedSideError, NonIntegrableError, PoleError

__all__ = [
    "Side",
    "Derivative",
    "FracOrder",
    "PowerTerm",
    "PowerSum",
    "gamma",
    "beta_fn",
    "frac_integral_exact",
    "frac_derivative_exact",
    "integrate_unit",
    "pairing",
    "EXPONENT_ATOL",
]

#: Exponents closer than this are merged; exponents this close to an integer are snapped.
EXPONENT_ATOL = 1e-12


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Derivative(str, Enum):
    RIEMANN_LIOUVILLE = "RiemannLiouville"
    CAPUTO = "Caputo"


def _as_side(side) -> Side:
    if isinstance(side, Side):
        return side
    return Side(str(side).lower())


def _as_kind(kind) -> Derivative:
    if isinstance(kind, Derivative):
        return kind
    key = str(kind).replace("-", "").replace("_", "").lower()
    if key in ("rl", "riemannliouville"):
        return Derivative.RIEMANN_LIOUVILLE
    if key == "caputo":
        return Derivative.CAPUTO
    raise ValueError(f"unknown derivative kind {kind!r}")


# {{{ special functions


def gamma(x: float) -> float:
    """Gamma function with an explicit pole error.

    Backed by :func:`math.gamma`, which is accurate to a few ulps and
    handles negative non-integers by reflection.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x:g}")
    return math.gamma(x)


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function ``B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)``."""
    if not (a > 0 and b > 0):
        raise ValueError(f"beta_fn requires a, b > 0, got ({a}, {b})")
    if a + b < 150.0:
        return gamma(a) * gamma(b) / gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


# }}}


# {{{ fractional order


@dataclass(frozen=True)
class FracOrder:
    """The order parameter ``beta`` of a ``2 - beta`` problem.

    ``kappa`` is the Lebesgue exponent of the solution spaces: 2 for
    ``beta < 1/2`` and just below ``1/beta`` otherwise, so that
    ``x**-beta`` is ``kappa``-integrable.
    """

    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not (0.0 < b < 1.0):
            raise ValueError(f"beta must lie in (0, 1), got {self.beta!r}")
        object.__setattr__(self, "beta", b)

    @property
    def order2(self) -> float:
        return 2.0 - self.beta

    @property
    def order1(self) -> float:
        return 1.0 - self.beta

    @property
    def epsilon(self) -> float:
        return min(0.01, 0.5 * (1.0 - self.beta))

    @property
    def kappa(self) -> float:
        if self.beta < 0.5:
            return 2.0
        return 1.0 + (1.0 - self.beta - self.epsilon) / self.beta

    @property
    def kappa_conjugate(self) -> float:
        k = self.kappa
        return k / (k - 1.0)

    @classmethod
    def coerce(cls, value) -> "FracOrder":
        return value if isinstance(value, cls) else cls(value)


# }}}


# {{{ power sums


@dataclass(frozen=True)
class PowerTerm:
    """``coef * x**exponent`` (left) or ``coef * (1 - x)**exponent`` (right)."""

    coef: float
    exponent: float
    side: Side = Side.LEFT

    def __post_init__(self):
        object.__setattr__(self, "coef", float(self.coef))
        object.__setattr__(self, "exponent", float(self.exponent))
        object.__setattr__(self, "side", _as_side(self.side))

    @property
    def is_constant(self) -> bool:
        return self.exponent == 0.0


def _snap(mu: float) -> float:
    r = round(mu)
    if abs(mu - r) <= EXPONENT_ATOL:
        return float(r)
    return mu


def _canonical(terms: Iterable[PowerTerm]) -> tuple[PowerTerm, ...]:
    acc: list[list] = []
    for t in terms:
        mu = _snap(t.exponent)
        side = Side.LEFT if mu == 0.0 else t.side
        for slot in acc:
            if slot[0] is side and abs(slot[1] - mu) <= EXPONENT_ATOL:
                slot[2] += t.coef
                break
        else:
            acc.append([side, mu, t.coef])
    out = [PowerTerm(c, mu, side) for side, mu, c in acc if c != 0.0]
    out.sort(key=lambda t: (t.side.value, t.exponent))
    return tuple(out)


class PowerSum:
    """Immutable canonical sum of power terms.

    Terms with equal ``(exponent, side)`` are merged and zero coefficients
    are dropped.  Constants are side-neutral and stored as left terms.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[PowerTerm] = ()):
        self._terms = _canonical(terms)

    # construction helpers

    @classmethod
    def monomial(cls, coef: float, exponent: float, side=Side.LEFT) -> "PowerSum":
        return cls([PowerTerm(coef, exponent, side)])

    @classmethod
    def constant(cls, c: float) -> "PowerSum":
        return cls([PowerTerm(c, 0.0)])

    @classmethod
    def from_pairs(cls, pairs, side=Side.LEFT) -> "PowerSum":
        """Build from ``[(coef, exponent), ...]`` on one side."""
        return cls(PowerTerm(c, mu, side) for c, mu in pairs)

    @classmethod
    def from_list(cls, items) -> "PowerSum":
        return cls(
            PowerTerm(d["coef"], d["exponent"], d.get("side", "left")) for d in items
        )

    def to_list(self) -> list[dict]:
        return [
            {"coef": t.coef, "exponent": t.exponent, "side": t.side.value}
            for t in self._terms
        ]

    # inspection

    @property
    def terms(self) -> tuple[PowerTerm, ...]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def sides(self) -> set[Side]:
        """Sides of the non-constant terms."""
        return {t.side for t in self._terms if not t.is_constant}

    def coefficient(self, exponent: float, side=Side.LEFT) -> float:
        mu = _snap(float(exponent))
        side = Side.LEFT if mu == 0.0 else _as_side(side)
        for t in self._terms:
            if t.side is side and abs(t.exponent - mu) <= EXPONENT_ATOL:
                return t.coef
        return 0.0

    def max_abs_coef(self) -> float:
        return max((abs(t.coef) for t in self._terms), default=0.0)

    def l1_bound(self) -> float:
        """Upper bound ``sum |c_i| / (mu_i + 1)`` on the L1 norm over (0, 1)."""
        _require_integrable(self)
        return sum(abs(t.coef) / (t.exponent + 1.0) for t in self._terms)

    # algebra

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = PowerSum.constant(other)
        if not isinstance(other, PowerSum):
            return NotImplemented
        return PowerSum(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return PowerSum(PowerTerm(-t.coef, t.exponent, t.side) for t in self._terms)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = PowerSum.constant(other)
        if not isinstance(other, PowerSum):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, np.floating)):
            return NotImplemented
        s = float(scalar)
        return PowerSum(PowerTerm(s * t.coef, t.exponent, t.side) for t in self._terms)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __eq__(self, other):
        if not isinstance(other, PowerSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def allclose(self, other: "PowerSum", atol: float = 1e-12) -> bool:
        return (self - other).max_abs_coef() <= atol

    def chop(self, atol: float) -> "PowerSum":
        """Drop terms with ``|coef| <= atol``."""
        return PowerSum(t for t in self._terms if abs(t.coef) > atol)

    # evaluation

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            for t in self._terms:
                base = x if t.side is Side.LEFT else 1.0 - x
                out = out + t.coef * np.power(base, t.exponent)
        return out if out.ndim else float(out)

    evaluate = __call__

    # classical calculus

    def derivative(self) -> "PowerSum":
        """Classical derivative ``d/dx``."""
        out = []
        for t in self._terms:
            if t.exponent == 0.0:
                continue
            sign = 1.0 if t.side is Side.LEFT else -1.0
            out.append(PowerTerm(sign * t.exponent * t.coef, t.exponent - 1.0, t.side))
        return PowerSum(out)

    def cumulative_integral(self) -> "PowerSum":
        """``x -> int_0^x p(s) ds``."""
        _require_integrable(self)
        out = []
        for t in self._terms:
            c = t.coef / (t.exponent + 1.0)
            if t.side is Side.LEFT:
                out.append(PowerTerm(c, t.exponent + 1.0, Side.LEFT))
            else:
                out.append(PowerTerm(c, 0.0))
                out.append(PowerTerm(-c, t.exponent + 1.0, Side.RIGHT))
        return PowerSum(out)

    def __repr__(self):
        if not self._terms:
            return "PowerSum(0)"
        parts = []
        for t in self._terms:
            base = "x" if t.side is Side.LEFT else "(1-x)"
            parts.append(f"{t.coef:.12g}*{base}^{t.exponent:.12g}")
        return "PowerSum(" + " + ".join(parts) + ")"


def _require_integrable(p: PowerSum):
    for t in p.terms:
        if not t.exponent > -1.0:
            raise NonIntegrableError(
                f"term {t.coef:g}*x^{t.exponent:g} is not integrable on (0, 1)"
            )


def _check_side(p: PowerSum, side: Side):
    other = p.sides() - {side}
    if other:
        raise MixedSideError(
            f"{side.value}-sided operator applied to a sum with {other.pop().value} terms;"
            " use the grid operators for mixed inputs"
        )


# }}}


# {{{ exact operators


def frac_integral_exact(side, alpha: float, p: PowerSum) -> PowerSum:
    """Exact one-sided Riemann-Liouville integral of order ``alpha`` in (0, 1].

    Each left term ``c x**mu`` maps to
    ``c Gamma(mu+1)/Gamma(alpha+mu+1) x**(alpha+mu)``; right terms mirror.
    """
    side = _as_side(side)
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    _check_side(p, side)
    return _integral(side, alpha, p)


def _integral(side: Side, alpha: float, p: PowerSum) -> PowerSum:
    _require_integrable(p)
    out = []
    for t in p.terms:
        mu = t.exponent
        c = t.coef * gamma(mu + 1.0) / gamma(alpha + mu + 1.0)
        out.append(PowerTerm(c, alpha + mu, side))
    return PowerSum(out)


def _side_derivative(side: Side, p: PowerSum) -> PowerSum:
    # D on left terms, (-D) on right terms: both give mu*c*base**(mu-1)
    return PowerSum(
        PowerTerm(t.exponent * t.coef, t.exponent - 1.0, side)
        for t in p.terms
        if t.exponent != 0.0
    )


def frac_derivative_exact(kind, side, sigma: float, p: PowerSum) -> PowerSum:
    """Exact fractional derivative of order ``sigma`` in (0, 2).

    With ``m = ceil(sigma)`` and ``alpha = m - sigma``, the Riemann-Liouville
    derivative is ``D^m I^alpha`` and the Caputo derivative is
    ``I^alpha D^m``.  Right-sided operators use ``(-D)^m``.

    Raises :class:`CaputoUndefined` when a classical derivative leaves a
    non-integrable power for the Caputo integral.
    """
    kind = _as_kind(kind)
    side = _as_side(side)
    sigma = float(sigma)
    if not (0.0 < sigma < 2.0):
        raise ValueError(f"sigma must lie in (0, 2), got {sigma}")
    _check_side(p, side)
    m = math.ceil(sigma - EXPONENT_ATOL)
    alpha = m - sigma
    if abs(alpha) <= EXPONENT_ATOL:
        alpha = 0.0

    if kind is Derivative.RIEMANN_LIOUVILLE:
        q = _integral(side, alpha, p) if alpha > 0.0 else p
        for _ in range(m):
            q = _side_derivative(side, q)
        return q

    q = p
    for _ in range(m):
        q = _side_derivative(side, q)
    for t in q.terms:
        if not t.exponent > -1.0:
            raise CaputoUndefined(
                f"Caputo derivative of order {sigma:g} needs the integral of "
                f"{t.coef:g}*x^{t.exponent:g}, which diverges"
            )
    return _integral(side, alpha, q) if alpha > 0.0 else q


def integrate_unit(p: PowerSum) -> float:
    """``int_0^1 p(x) dx``."""
    _require_integrable(p)
    return math.fsum(t.coef / (t.exponent + 1.0) for t in p.terms)


def pairing(p: PowerSum, q: PowerSum) -> float:
    """``int_0^1 p(x) q(x) dx`` in closed form.

    The usual call pairs a left sum with a right sum, where each cross term
    is ``c d B(mu + 1, nu + 1)``.  Same-side products are also accepted.
    """
    total = []
    for s in p.terms:
        for t in q.terms:
            if s.is_constant or t.is_constant or s.side is not t.side:
                mu = s.exponent
                nu = t.exponent
                if s.is_constant and not t.is_constant:
                    mu, nu = nu, mu
                if not (mu > -1.0 and nu > -1.0):
                    raise NonIntegrableError(
                        f"pairing of exponents {s.exponent:g} and {t.exponent:g} diverges"
                    )
                total.append(s.coef * t.coef * beta_fn(mu + 1.0, nu + 1.0))
            else:
                e = s.exponent + t.exponent
                if not e > -1.0:
                    raise NonIntegrableError(
                        f"pairing of same-side exponents {s.exponent:g}+{t.exponent:g} diverges"
                    )
                total.append(s.coef * t.coef / (e + 1.0))
    return math.fsum(total)


# }}}
