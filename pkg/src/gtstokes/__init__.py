"""Gelfand-Tsetlin coordinates, the explicit Alekseev-Meinrenken map and Stokes data.

Submodules
----------
linalg       Hermitian eigen-solvers, minors, log-Gamma, Cholesky.
gt           Spectrum tables, diagonalizers, ladders, Thimm torus actions.
caterpillar  Connection and Stokes matrices at the caterpillar point.
am           The explicit map Γ_AM and its unitary factors.
oracle       Direct numerical Stokes data of dF/dz = (iu − A/(2πi z)) F.
iso          Isomonodromy flow, dressing g(u; A), ψ(u) and decay checks.
"""

__version__ = "0.1.0"

from .am import AMFactorization, am_via_rh, gamma_am, gamma_am_2x2, phase_theta, psi_factor
from .caterpillar import (CaterpillarResult, StokesPair, connection_product, decompose_DLR,
                          extract_stokes, normalized_connection, rh_caterpillar, stokes_subdiag,
                          verify_monodromy)
from .errors import (AngleUndefinedError, ChamberError, ConeViolationError, FactorizationError,
                     FormulaDomainError, GTStokesError, NotHermitianError, OracleError, ParseError)
from .gt import (GTCoordinates, SpectrumTable, TorusElement, diagonalizer_P, gt_a_coeffs,
                 gt_coordinates, gt_map, ladder_L, rebuild, thimm_act, thimm_act_full)
from .iso import (FlowState, boundary_fit, g_factor, iso_flow, iso_rhs, psi_u, ratio_angles,
                  verify_mainthm)
from .oracle import LinearSystem, OracleConfig, connection_numeric, run_oracle, stokes_numeric

__all__ = [
    "AMFactorization", "am_via_rh", "gamma_am", "gamma_am_2x2", "phase_theta", "psi_factor",
    "CaterpillarResult", "StokesPair", "connection_product", "decompose_DLR", "extract_stokes",
    "normalized_connection", "rh_caterpillar", "stokes_subdiag", "verify_monodromy",
    "AngleUndefinedError", "ChamberError", "ConeViolationError", "FactorizationError",
    "FormulaDomainError", "GTStokesError", "NotHermitianError", "OracleError", "ParseError",
    "GTCoordinates", "SpectrumTable", "TorusElement", "diagonalizer_P", "gt_a_coeffs",
    "gt_coordinates", "gt_map", "ladder_L", "rebuild", "thimm_act", "thimm_act_full",
    "FlowState", "boundary_fit", "g_factor", "iso_flow", "iso_rhs", "psi_u", "ratio_angles",
    "verify_mainthm",
    "LinearSystem", "OracleConfig", "connection_numeric", "run_oracle", "stokes_numeric",
]
