"""Dense complex linear algebra and special functions.

Everything here is a thin, checked layer over numpy/scipy so that the
rest of the package can rely on fixed conventions: eigenvalues in
descending order, upper Cholesky factors with positive diagonal, and a
principal-branch complex log-Gamma.
"""

import numpy as np
from scipy.special import loggamma

from .errors import FactorizationError, FormulaDomainError, NotHermitianError

TWO_PI_I = 2j * np.pi

TOL_HERM = 1e-12
TOL_UNITARY = 1e-10


def as_hermitian(H, tol=TOL_HERM):
    """Return `H` as a complex array, checking Hermitian symmetry.

    The check is relative: ``‖H − H†‖ ≤ tol·(1 + ‖H‖)``. The returned
    matrix is exactly Hermitian (symmetrized).
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {H.shape}")
    asym = np.abs(H - H.conj().T).max() if H.size else 0.0
    scale = 1.0 + (np.abs(H).max() if H.size else 0.0)
    if asym > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return (H + H.conj().T) / 2


def hermitian_eigen_desc(H):
    """Eigen-decomposition with eigenvalues sorted in descending order.

    Parameters
    ----------
    H : (n, n) array_like
        Hermitian matrix.

    Returns
    -------
    values : (n,) ndarray
        Real eigenvalues, ``values[0] ≥ values[1] ≥ ...``.
    vectors : (n, n) ndarray
        Unitary matrix whose columns are the matching eigenvectors, so
        that ``H = V diag(values) V†``.
    """
    H = as_hermitian(H)
    w, V = np.linalg.eigh(H)
    return w[::-1].copy(), V[:, ::-1].copy()


def hermitian_function(H, f):
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, V = hermitian_eigen_desc(H)
    return (V * f(w)) @ V.conj().T


def expm_hermitian(H):
    return hermitian_function(H, np.exp)


def ratio_power(x, H):
    """Compute ``x^{H/2πi}`` for real ``x > 0`` and Hermitian `H`.

    The result is unitary since the exponent is ``-i·log(x)/2π`` times a
    Hermitian matrix.
    """
    if not x > 0:
        raise FormulaDomainError(f"ratio power needs a positive base, got {x}")
    return hermitian_function(H, lambda w: np.exp(w * np.log(x) / TWO_PI_I))


def minor_det(A, rows, cols):
    """Determinant of the submatrix ``A[rows, cols]`` (0-based index sets).

    Uses LU with partial pivoting (``numpy.linalg.det``). An empty index
    set gives 1, the value of the empty determinant.
    """
    rows = list(rows)
    cols = list(cols)
    if len(rows) != len(cols):
        raise ValueError(f"index sets differ in size ({len(rows)} vs {len(cols)})")
    if not rows:
        return 1.0 + 0j
    A = np.asarray(A)
    return complex(np.linalg.det(A[np.ix_(rows, cols)]))


def log_gamma_complex(z):
    """Principal branch of log Γ(z), vectorized.

    Raises
    ------
    FormulaDomainError
        If any `z` is a non-positive integer (a pole of Γ).
    """
    z = np.asarray(z, dtype=complex)
    poles = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(poles):
        raise FormulaDomainError("log-Gamma evaluated at a pole")
    out = loggamma(z)
    return out if out.ndim else complex(out)


def lgamma_1p(r):
    """``log Γ(1 + r/2πi)`` for real `r`; never hits a pole."""
    return loggamma(1 + np.asarray(r, dtype=float) / TWO_PI_I)


def cholesky_upper(M):
    """Upper-triangular `R` with positive diagonal and ``M = R† R``.

    Raises
    ------
    FactorizationError
        If `M` is not positive definite. The error names the first
        leading block that fails.
    """
    M = as_hermitian(M)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        for k in range(1, M.shape[0] + 1):
            d = np.linalg.det(M[:k, :k]).real
            if d <= 0:
                raise FactorizationError(k, d) from None
        raise FactorizationError(M.shape[0]) from None
    return L.conj().T


def exp_diag(d):
    return np.diag(np.exp(np.asarray(d, dtype=float)))


def unitarity_residual(U):
    U = np.asarray(U)
    return float(np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0])))


def embed(block, n):
    """Place a k×k block in the upper-left corner of the n×n identity."""
    k = block.shape[0]
    out = np.eye(n, dtype=complex)
    out[:k, :k] = block
    return out
