"""Toolkit for time-frequency shift invariance of finite Gabor spaces.

Two layers: exact rational lattice algebra (`lattice`) for the constructive
reductions, and a finite-dimensional Gabor model on C^L (`gabor`,
`symplectic`, `invariance`) for the operator-theoretic characterizations,
plus Beurling-density estimators and equidistribution diagnostics
(`density`).
"""

__version__ = "0.1.0"

from . import density, errors, gabor, invariance, lattice, serialize, symplectic
from .errors import GaborError
from .lattice import (
    Lattice2D,
    RationalMatrix2x2,
    ReductionResult,
    SeparableLattice,
    adjoint_lattice,
    coset_decomposition,
    order_in_lattice,
    reduce_invariant_shift,
    separate,
)
from .lattice import density as lattice_density  # the submodule owns the bare name
from .gabor import (
    FiniteGaborSystem,
    canonical_dual,
    cross_frame_operator,
    frame_bounds,
    frame_operator_direct,
    frame_operator_walnut,
    gabor_matrix,
    janssen_representation,
    periodized_gaussian,
    support_space,
    tf_shift,
)
from .symplectic import (
    MetaplecticOperator,
    covariance_residual,
    metaplectic_from_generators,
    transport_system,
)
from .invariance import (
    CriteriaReport,
    InvarianceReport,
    criteria_engine,
    dft_vector_relation,
    gaussian_corollary_scenario,
    group_closure_check,
    membership_residual,
    scan_invariance,
    small_shift_completeness,
)

__all__ = [
    "GaborError",
    "Lattice2D",
    "RationalMatrix2x2",
    "ReductionResult",
    "SeparableLattice",
    "adjoint_lattice",
    "coset_decomposition",
    "lattice_density",
    "order_in_lattice",
    "reduce_invariant_shift",
    "separate",
    "FiniteGaborSystem",
    "canonical_dual",
    "cross_frame_operator",
    "frame_bounds",
    "frame_operator_direct",
    "frame_operator_walnut",
    "gabor_matrix",
    "janssen_representation",
    "periodized_gaussian",
    "support_space",
    "tf_shift",
    "MetaplecticOperator",
    "covariance_residual",
    "metaplectic_from_generators",
    "transport_system",
    "CriteriaReport",
    "InvarianceReport",
    "criteria_engine",
    "dft_vector_relation",
    "gaussian_corollary_scenario",
    "group_closure_check",
    "membership_residual",
    "scan_invariance",
    "small_shift_completeness",
    "__version__",
]
