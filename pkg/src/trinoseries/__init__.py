"""Taylor and Puiseux expansions for monomials of principal solutions to
reduced trinomial algebraic systems, with a Mellin-Barnes residue-summation
cross-route and an independent numeric continuation oracle."""

__version__ = "0.1.0"

from .errors import (
    BranchOutOfRangeError,
    DegeneratePairingError,
    NoConvergenceError,
    NonSimplePoleError,
    PathSingularError,
    PoleError,
    SingularKappaError,
    SingularMatrixError,
    TrinoseriesError,
    ZeroCoordinateError,
)
from .gamma import gamma_ratio, gamma_ratio_float, gamma_ratio_vector
from .intlinalg import SnfDecomposition, rational_inverse, smith_normal_form
from .mellinbarnes import (
    DivisorPairing,
    MBIntegralData,
    ResidueCone,
    convergence_nonempty,
    q_polynomial,
    residue_coefficients,
    residue_lattice,
    residue_sum,
)
from .oracle import (
    monomial_of_solution,
    monomial_series,
    principal_solution,
    reference_coefficient,
)
from .puiseux import (
    PuiseuxSeries,
    best_branch,
    evaluate_puiseux,
    puiseux_coefficient,
    support_point,
)
from .systems import (
    Reduction,
    TrinomialSystem,
    build_reduction,
    monomial_change,
    polyhomogeneity_data,
    system_from_json,
    system_to_json,
)
from .taylor import TaylorSeries, evaluate_taylor, q_determinant, taylor_coefficient

__all__ = [name for name in dir() if not name.startswith("_")]
