"""Exception types shared across the package."""

from __future__ import annotations


class PoleError(ValueError):
    """Gamma function evaluated at a non-positive integer."""


class MixedSideError(ValueError):
    """A one-sided operator received terms anchored at the other endpoint."""


class NonIntegrableError(ValueError):
    """A power term with exponent <= -1 reached an integration."""


class CaputoUndefined(ArithmeticError):
    """A Caputo derivative would require integrating a non-integrable derivative."""


class IncompatibleData(ValueError):
    """Problem data violate the solvability constraint.

    ``residual`` carries the signed constraint value and ``tolerance``
    the scaled tolerance it was compared against.
    """

    def __init__(self, message: str, residual: float, tolerance: float | None = None):
        super().__init__(message)
        self.residual = float(residual)
        self.tolerance = tolerance


class IllPosedProblem(ValueError):
    """The requested combination does not admit a solution for these data."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class CertificateUnavailable(ValueError):
    """An ill-posedness certificate was requested for a well-posed cell."""


class SingularSystem(RuntimeError):
    """The assembled Galerkin system could not be factorized."""
