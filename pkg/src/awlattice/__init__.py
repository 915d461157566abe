"""Tridiagonal pairs of Askey-Wilson type from quantum-group coideals, the
associated reflection matrices, and the open asymmetric exclusion process.

The package has two halves that check each other.  The constructive half
builds representations (finite spin, evaluation, polynomial-basis), coideal
generator pairs with their structure constants, R/L/K lattice matrices, and
the matrix-product stationary state of the open exclusion process.  The
oracle half independently verifies everything it can reach: exact
master-equation solves, exact diagonalization of the open spin chain, and
brute-force relation residuals.  Every convention ambiguity met along the
way is resolved by an explicit audit function rather than silently
(``kmatrix_variant_report``, ``mpa_convention_audit``,
``casimir_centrality_residuals``, ``qserre_residual_both_signs``,
``boundary_constants_report``); the CLI stamps the resolved conventions
into every report.
"""

__version__ = "0.1.0"

from .qspecial import AWParams, QParams
from .quantumrep import CoidealParams, SpinRep, build_evaluation_rep, build_spin_rep
from .awalgebra import (
    AWStructure,
    TridiagonalPair,
    aw_residual,
    build_basic_representation,
    build_coideal_ops,
    coideal_structure_constants,
    fit_structure_constants,
)
from .lattice import (
    build_k_matrix,
    build_k_matrix_dual,
    dual_reflection_residual,
    r_matrix,
    reflection_residual,
    rll_residual,
    ybe_residual,
)
from .asep import (
    ASEPRates,
    MPAState,
    Observables,
    build_mpa,
    kappa_map,
    mpa_distribution,
    observables,
)
from .oracle import (
    build_generator,
    build_xxz,
    oracle_observables,
    spectrum_compare,
    stationary_distribution,
)

__all__ = [
    "__version__",
    "AWParams",
    "QParams",
    "CoidealParams",
    "SpinRep",
    "build_evaluation_rep",
    "build_spin_rep",
    "AWStructure",
    "TridiagonalPair",
    "aw_residual",
    "build_basic_representation",
    "build_coideal_ops",
    "coideal_structure_constants",
    "fit_structure_constants",
    "build_k_matrix",
    "build_k_matrix_dual",
    "dual_reflection_residual",
    "r_matrix",
    "reflection_residual",
    "rll_residual",
    "ybe_residual",
    "ASEPRates",
    "MPAState",
    "Observables",
    "build_mpa",
    "kappa_map",
    "mpa_distribution",
    "observables",
    "build_generator",
    "build_xxz",
    "oracle_observables",
    "spectrum_compare",
    "stationary_distribution",
]
