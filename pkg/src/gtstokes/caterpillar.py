"""Connection and Stokes data at the caterpillar point.

The Riemann-Hilbert map at the caterpillar point factors through one
normalized connection matrix per level,

    ν(u_cat, A) = Ĉ e^{diag λ^(n)} Ĉ⁻¹,   Ĉ = Ĉ^(2) Ĉ^(3) ··· Ĉ^(n),

where Ĉ^(k+1) only sees the spectra at levels k, k+1, the coefficients
a^(k) and the diagonal entry A_{k+1,k+1}. All Gamma products are
accumulated in log space.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

from .gt import gt_a_coeffs, gt_map, normalizers, require_cone
from .linalg import (TWO_PI_I, as_hermitian, cholesky_upper, exp_diag, expm_hermitian,
                     lgamma_1p, minor_det, unitarity_residual)


@dataclass(frozen=True)
class StokesPair:
    s_plus: np.ndarray
    s_minus: np.ndarray

    @classmethod
    def from_upper(cls, s_plus):
        return cls(s_plus, s_plus.conj().T)

    def product(self):
        return self.s_minus @ self.s_plus


@dataclass(frozen=True)
class CaterpillarResult:
    nu: np.ndarray
    c_tilde: np.ndarray
    stokes: StokesPair
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        from .jsonio import matrix_to_json
        return {"nu": matrix_to_json(self.nu, hermitian=True),
                "c_tilde": matrix_to_json(self.c_tilde),
                "s_plus": matrix_to_json(self.stokes.s_plus),
                "diagnostics": dict(self.diagnostics)}


def _dl_log(mu, lam):
    """log of D_L entries: Γ-ratio attached to the lower level `mu`."""
    return np.array([lgamma_1p(mu - mu[i]).sum() - lgamma_1p(lam - mu[i]).sum()
                     for i in range(len(mu))])


def _dr_log(mu, lam):
    """log of D_R entries: Γ-ratio attached to the upper level `lam`."""
    return np.array([lgamma_1p(lam - lam[j]).sum() - lgamma_1p(mu - lam[j]).sum()
                     for j in range(len(lam))])


def _level_data(A, k1, gap_tol=None):
    table = require_cone(A, gap_tol=gap_tol)
    mu, lam = table.level(k1 - 1), table.level(k1)
    a = gt_a_coeffs(A, k1 - 1, gap_tol=gap_tol) if k1 > 1 else np.empty(0)
    return mu, lam, a, normalizers(table, k1)


def normalized_connection(A, k1, gap_tol=None):
    """Normalized connection matrix Ĉ^(k1) = C(E_k1, δ_k1(A_{k1-1})) L^(k1).

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian matrix in the open GT cone.
    k1 : int
        Level, ``2 ≤ k1 ≤ n``.

    Returns
    -------
    (n, n) ndarray
        Unitary; identity outside the leading k1×k1 block.

    Notes
    -----
    Entry (i, j) with i < k1 is

        e^{(μ_i−λ_j)/4} / (λ_j−μ_i) · Π_vΓ(1+(λ_v−λ_j)/2πi) Π_vΓ(1+(μ_v−μ_i)/2πi)
        / [Π_{v≠i}Γ(1+(μ_v−λ_j)/2πi) Π_{v≠j}Γ(1+(λ_v−μ_i)/2πi)] · a_i / N_j,

    with μ = λ^(k1-1), λ = λ^(k1); the last row is
    e^{(λ_j−A_{k1k1})/4} Π_vΓ(1+(λ_v−λ_j)/2πi) / (N_j Π_vΓ(1+(μ_v−λ_j)/2πi)).
    """
    A = as_hermitian(A)
    n = A.shape[0]
    if not 2 <= k1 <= n:
        raise ValueError(f"level {k1} out of range 2..{n}")
    mu, lam, a, N = _level_data(A, k1, gap_tol)
    k = k1 - 1
    dr = _dr_log(mu, lam)
    dl = _dl_log(mu, lam)
    C = np.eye(n, dtype=complex)
    for i in range(k):
        for j in range(k1):
            x = mu[i] - lam[j]
            # the two excluded factors of the cross products give |Γ(1+x/2πi)|²
            lg = dl[i] + dr[j] + lgamma_1p(x) + lgamma_1p(-x)
            C[i, j] = -np.exp(x / 4 + lg) / x * a[i] / N[j]
    C[k, :k1] = np.exp((lam - A[k, k].real) / 4 + dr) / N
    return C


@dataclass(frozen=True)
class DLRFactors:
    """Factors of Ĉ^(i) = D_L · diag(−a, 1…) · R · D_R (all n×n)."""

    d_left: np.ndarray
    signs: np.ndarray
    r: np.ndarray
    d_right: np.ndarray

    def product(self):
        return self.d_left @ self.signs @ self.r @ self.d_right


def decompose_DLR(A, i, gap_tol=None):
    """Split Ĉ^(i) into Gamma-phase diagonals and a real action-only core.

    ``R_kj = e^{(μ_k−λ_j)/4} / (2 N_j sinh((μ_k−λ_j)/2))`` for k < i and
    ``R_ij = e^{(λ_j−A_ii)/4} / N_j``; R depends on the spectra only.
    """
    A = as_hermitian(A)
    n = A.shape[0]
    if not 2 <= i <= n:
        raise ValueError(f"level {i} out of range 2..{n}")
    mu, lam, a, N = _level_data(A, i, gap_tol)
    k = i - 1
    d_left = np.ones(n, dtype=complex)
    d_left[:k] = np.exp(_dl_log(mu, lam))
    d_right = np.ones(n, dtype=complex)
    d_right[:i] = np.exp(_dr_log(mu, lam))
    signs = np.ones(n, dtype=complex)
    signs[:k] = -a
    R = np.eye(n)
    x = mu[:, None] - lam[None, :]
    R[:k, :i] = np.exp(x / 4) / (2 * np.sinh(x / 2)) / N[None, :]
    R[k, :i] = np.exp((lam - A[k, k].real) / 4) / N
    return DLRFactors(np.diag(d_left), np.diag(signs), R, np.diag(d_right))


def connection_product(A, gap_tol=None):
    """Ordered product Ĉ^(2) ··· Ĉ^(n); the identity for n = 1."""
    A = as_hermitian(A)
    n = A.shape[0]
    C = np.eye(n, dtype=complex)
    for k1 in range(2, n + 1):
        C = C @ normalized_connection(A, k1, gap_tol=gap_tol)
    return C


def extract_stokes(M, diagA=None):
    """Factor a positive definite M as S₋S₊ with S₋ = S₊†, S₊ upper triangular.

    Returns
    -------
    pair : StokesPair
    diag_residual : float or None
        ``max|diag(S₊) − e^{diagA/2}|`` when `diagA` is given.
    """
    S = cholesky_upper(M)
    resid = None
    if diagA is not None:
        resid = float(np.abs(np.diag(S) - np.exp(np.asarray(diagA, dtype=float) / 2)).max())
    return StokesPair.from_upper(S), resid


def rh_caterpillar(A, gap_tol=None):
    """Riemann-Hilbert map at the caterpillar point, with Stokes factors."""
    A = as_hermitian(A)
    table = require_cone(A, gap_tol=gap_tol)
    C = connection_product(A, gap_tol=gap_tol)
    nu = C @ exp_diag(table.level(table.n)) @ C.conj().T
    nu = (nu + nu.conj().T) / 2
    stokes, diag_res = extract_stokes(nu, np.diag(A).real)
    diagnostics = {"unitarity": unitarity_residual(C),
                   "diag_residual": diag_res,
                   "monodromy": verify_monodromy(C, A, stokes, frame="eigen")}
    return CaterpillarResult(nu, C, stokes, diagnostics)


def _subdiag_terms(Phi0, k, sign):
    """Sum over i in the sub-diagonal formula; sign=+1 for S₊, −1 for S₋."""
    n = Phi0.shape[0]
    table = gt_map(Phi0)
    lam, lp, lm = table.level(k), table.level(k + 1), table.level(k - 1)
    rows, cols = list(range(k)), list(range(k - 1)) + [k]
    total = 0j
    for i in range(k):
        others = np.delete(lam, i) - lam[i]
        lg = (loggamma(1 + sign * others / TWO_PI_I).sum()
              - loggamma(1 + sign * (lp - lam[i]) / TWO_PI_I).sum()
              + loggamma(sign * others / TWO_PI_I).sum()
              - loggamma(1 + sign * (lm - lam[i]) / TWO_PI_I).sum())
        if sign > 0:
            d = minor_det((Phi0 - lam[i] * np.eye(n)) / TWO_PI_I, rows, cols)
        else:
            d = minor_det((lam[i] * np.eye(n) - Phi0) / TWO_PI_I, cols, rows)
        total += np.exp(lg) * d
    return sign * TWO_PI_I * np.exp((Phi0[k - 1, k - 1].real + Phi0[k, k].real) / 4) * total


def stokes_subdiag(Phi0, gap_tol=None):
    """Closed-form sub-diagonals of the caterpillar Stokes matrices.

    Returns
    -------
    list of (complex, complex)
        ``[((S₊)_{k,k+1}, (S₋)_{k+1,k}) for k = 1..n-1]``.
    """
    Phi0 = as_hermitian(Phi0)
    require_cone(Phi0, gap_tol=gap_tol)
    return [(_subdiag_terms(Phi0, k, +1), _subdiag_terms(Phi0, k, -1))
            for k in range(1, Phi0.shape[0])]


def verify_monodromy(C, A, S, frame="matrix"):
    """Residual ‖C e^A C⁻¹ − S₋S₊‖ (Frobenius).

    With ``frame="eigen"`` the exponent is diag(λ^(n)(A)) instead of A, the
    form in which Ĉ carries the eigenframe.
    """
    if frame == "eigen":
        E = exp_diag(gt_map(A).level(A.shape[0]))
    else:
        E = expm_hermitian(A)
    return float(np.linalg.norm(C @ E @ np.linalg.inv(C) - S.product()))
