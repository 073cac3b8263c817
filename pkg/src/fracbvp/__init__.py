"""Fractional two-point boundary-value problems of order 2 - β on (0, 1).

Closed-form fractional calculus on power sums, product-integration grid
operators, a nine-cell well-posedness classifier, constructive solvers for
the well-posed cells and an independent Galerkin cross-check.
"""

from .errors import (
    CaputoUndefined,
    CertificateUnavailable,
    IllPosedProblem,
    IncompatibleData,
    MixedSideError,
    NonIntegrableError,
    PoleError,
    SingularSystem,
)
from .frac_grid import (
    GridFunction,
    caputo_derivative_grid,
    frac_integral_grid,
    rl_derivative_grid,
    singular_pairing,
)
from .galerkin_fem import FemSystem, assemble, solve_fem
from .reduction_solvers import Normalization, ResidualReport, Solution, residual_report, solve
from .special import (
    Derivative,
    FracOrder,
    PowerSum,
    PowerTerm,
    Side,
    beta_fn,
    frac_derivative_exact,
    frac_integral_exact,
    gamma,
    pairing,
)
from .wellposedness import (
    BcType,
    ConstraintKind,
    EquationForm,
    ProblemSpec,
    Status,
    classification_table,
    classify,
    compatibility_residual,
    illposedness_certificate,
)

__version__ = "0.1.0"
