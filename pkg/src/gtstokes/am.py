"""Explicit Alekseev-Meinrenken diffeomorphism Γ_AM: Herm(n) → Herm⁺(n).

Γ_AM(A) = ψ(A) e^{diag λ^(n)} ψ(A)⁻¹ with ψ = ψ^(1) ψ^(2) ··· ψ^(n), where
each ψ^(k) is built from sinh ratios of the spectra at levels k-2, k-1, k
and one minor of A. Only the open cone Herm₀(n) is supported.
"""

from dataclasses import dataclass

import numpy as np

from .caterpillar import _dl_log, _dr_log, rh_caterpillar
from .errors import FormulaDomainError
from .gt import TorusElement, require_cone, thimm_act_full
from .linalg import as_hermitian, exp_diag, minor_det


@dataclass(frozen=True)
class AMFactorization:
    psi_factors: tuple
    psi: np.ndarray
    gamma: np.ndarray


def _log_abs_sinh_half(x):
    """log|sinh(x/2)| and sign, stable for large |x|."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    return ax / 2 + np.log1p(-np.exp(-ax)) - np.log(2), np.sign(x)


def _sinh_ratio(num, den):
    """Π sinh(num/2) / Π sinh(den/2) as (log|·|, sign)."""
    ln, sn = _log_abs_sinh_half(num)
    ld, sd = _log_abs_sinh_half(den)
    return ln.sum() - ld.sum(), np.prod(sn) * np.prod(sd)


def psi_factor(A, k, gap_tol=None):
    """The unitary factor ψ^(k)(A).

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian matrix in the open GT cone.
    k : int
        ``1 ≤ k ≤ n``; ψ^(1) is the identity.

    Returns
    -------
    (n, n) ndarray
        Identity outside the leading k×k block.

    Notes
    -----
    With μ = λ^(k-1), λ = λ^(k), ν = λ^(k-2) and 0-based i < k-1, the
    entries are

        e^{(μ_i−λ_j)/4} sgn(λ_j−μ_i) |S_ij|^{1/2} · (−1)^{k+i} Δ_i / sqrt(−Π(μ_i−λ)Π(μ_i−ν)),

    where S_ij is the sinh ratio and Δ_i the minor of A − μ_i on rows
    1..k-1 and columns 1..k-2, k. Every S_ij is negative on the open cone,
    so the radicand is taken in absolute value and the sign carried
    explicitly. Row k is e^{(λ_j−A_kk)/4} times a positive square root.
    """
    A = as_hermitian(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"level {k} out of range 1..{n}")
    table = require_cone(A, gap_tol=gap_tol)
    P = np.eye(n, dtype=complex)
    if k == 1:
        return P
    lam, mu, nu = table.level(k), table.level(k - 1), table.level(k - 2)
    rows = list(range(k - 1))
    cols = list(range(k - 2)) + [k - 1]
    for i in range(k - 1):
        rad = -np.prod(mu[i] - lam) * np.prod(mu[i] - nu)
        if not rad > 0:
            raise FormulaDomainError(f"phase radicand {rad:.3e} not positive (level {k}, row {i + 1})")
        phase = (-1) ** (k + i) * minor_det(A - mu[i] * np.eye(n), rows, cols) / np.sqrt(rad)
        mu_o = np.delete(mu, i)
        for j in range(k):
            lam_o = np.delete(lam, j)
            ls, sgn = _sinh_ratio(np.concatenate([mu_o - lam[j], mu[i] - lam_o]),
                                  np.concatenate([lam_o - lam[j], mu[i] - mu_o]))
            if not sgn < 0:
                raise FormulaDomainError(f"sinh ratio has unexpected sign (level {k}, entry {i + 1},{j + 1})")
            P[i, j] = np.exp((mu[i] - lam[j]) / 4 + ls / 2) * np.sign(lam[j] - mu[i]) * phase
    for j in range(k):
        ls, sgn = _sinh_ratio(mu - lam[j], np.delete(lam, j) - lam[j])
        if not sgn > 0:
            raise FormulaDomainError(f"last-row radicand negative (level {k}, column {j + 1})")
        P[k - 1, j] = np.exp((lam[j] - A[k - 1, k - 1].real) / 4 + ls / 2)
    return P


def gamma_am(A, gap_tol=None):
    """Γ_AM(A) together with its unitary factors.

    Returns
    -------
    AMFactorization
        ``gamma`` is positive definite Hermitian.
    """
    A = as_hermitian(A)
    n = A.shape[0]
    table = require_cone(A, gap_tol=gap_tol)
    factors = tuple(psi_factor(A, k, gap_tol=gap_tol) for k in range(1, n + 1))
    psi = np.eye(n, dtype=complex)
    for f in factors:
        psi = psi @ f
    gamma = psi @ exp_diag(table.level(n)) @ psi.conj().T
    return AMFactorization(factors, psi, (gamma + gamma.conj().T) / 2)


def gamma_am_2x2(a, b, c):
    """Closed form of Γ_AM for ``[[a, b], [conj(b), c]]``.

    Raises
    ------
    ValueError
        If ``b == 0`` (the matrix is on the cone boundary).
    """
    if b == 0:
        raise ValueError("b must be nonzero")
    tr, disc = a + c, np.hypot(a - c, 2 * abs(b))
    l1, l2 = (tr + disc) / 2, (tr - disc) / 2
    # this combination equals (e^{l1}-e^a)(e^a-e^{l2}) ≥ 0
    rad = np.exp(a + l1) + np.exp(a + l2) - np.exp(2 * a) - np.exp(l1 + l2)
    bp = np.exp(1j * np.angle(b)) * np.sqrt(max(rad, 0.0))
    return np.array([[np.exp(a), bp],
                     [np.conj(bp), np.exp(l1) + np.exp(l2) - np.exp(a)]])


def phase_theta(A, gap_tol=None):
    """Torus element θ(A) with Γ_AM = ν(u_cat) ∘ X_θ.

    θ^(i)_j = −Arg(D_R^(i)_jj · D_L^(i)_jj), where D_R^(i) is the right Gamma
    diagonal of Ĉ^(i) and D_L^(i) the left one of Ĉ^(i+1). Depends on the
    actions only.
    """
    A = as_hermitian(A)
    table = require_cone(A, gap_tol=gap_tol)
    n = table.n
    levels = []
    for i in range(1, n):
        dr = _dr_log(table.level(i - 1), table.level(i))
        dl = _dl_log(table.level(i), table.level(i + 1))
        levels.append(-(dr + dl).imag)
    return TorusElement(tuple(levels))


def am_via_rh(A, gap_tol=None):
    """Γ_AM computed as ν(u_cat, X_θ(A))."""
    A = as_hermitian(A)
    theta = phase_theta(A, gap_tol=gap_tol)
    return rh_caterpillar(thimm_act_full(theta, A, gap_tol=gap_tol), gap_tol=gap_tol).nu
