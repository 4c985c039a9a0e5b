"""Isomonodromy flow, the caterpillar dressing g(u; A) and the map ψ(u).

The flow ∂Φ/∂u_k = (1/2πi)[Φ, ad_u⁻¹ ad_{E_k} Φ] is a commutator flow, so
the spectrum of Φ is conserved; its diagonal is conserved too. Along a
flow the Stokes matrices do not change.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .am import gamma_am, phase_theta
from .errors import ChamberError, OracleError
from .gt import TorusElement, require_cone, thimm_act_full
from .linalg import TWO_PI_I, as_hermitian, ratio_power
from .oracle import LinearSystem, OracleConfig, stokes_numeric

log = logging.getLogger(__name__)


def _check_chamber(u, tol=0.0):
    u = np.asarray(u, dtype=float)
    if u.size > 1 and not np.all(np.diff(u) > tol):
        raise ChamberError(f"u must be strictly increasing, got {u}")
    return u


def iso_rhs(u, Phi):
    """All partial derivatives ∂Φ/∂u_k, k = 1..n, as an (n, n, n) array."""
    u = np.asarray(u, dtype=float)
    Phi = np.asarray(Phi, dtype=complex)
    n = u.size
    du = u[:, None] - u[None, :]
    if np.any(du[~np.eye(n, dtype=bool)] == 0):
        raise ChamberError("coincident entries in u")
    out = np.empty((n, n, n), dtype=complex)
    for k in range(n):
        Y = np.zeros((n, n), dtype=complex)
        others = np.arange(n) != k
        # ad_u^{-1} ad_{E_k} Φ lives on row and column k
        Y[k, others] = Phi[k, others] / du[k, others]
        Y[others, k] = Phi[others, k] / du[k, others]
        out[k] = (Phi @ Y - Y @ Phi) / TWO_PI_I
    return out


@dataclass(frozen=True)
class FlowState:
    u: np.ndarray
    Phi: np.ndarray
    drift: float = 0.0
    history: tuple = field(default=(), repr=False)


def iso_flow(state, u_target, rtol=1e-12, atol=1e-14, chunks=20, keep_history=False):
    """Integrate the flow along the straight segment from ``state.u`` to `u_target`.

    The segment is cut into `chunks` pieces; after each the matrix is
    re-symmetrized and the Hermiticity drift recorded.

    Returns
    -------
    FlowState
        ``drift`` is the largest ‖Φ − Φ†‖ seen before re-symmetrization.
    """
    u0 = _check_chamber(state.u)
    u1 = _check_chamber(u_target)
    if u0.shape != u1.shape:
        raise ValueError("start and target u differ in size")
    Phi = as_hermitian(state.Phi)
    n = u0.size
    du = u1 - u0

    def rhs(t, y):
        P = y.reshape(n, n)
        D = iso_rhs(u0 + t * du, P)
        return np.tensordot(du, D, axes=1).ravel()

    drift = 0.0
    history = [(u0.copy(), Phi.copy())] if keep_history else []
    ts = np.linspace(0.0, 1.0, chunks + 1)
    for a, b in zip(ts[:-1], ts[1:]):
        sol = solve_ivp(rhs, (a, b), Phi.ravel(), method="DOP853", rtol=rtol, atol=atol)
        if sol.status != 0:
            raise OracleError(f"isomonodromy integration failed: {sol.message}")
        P = sol.y[:, -1].reshape(n, n)
        d = float(np.linalg.norm(P - P.conj().T))
        drift = max(drift, d)
        Phi = (P + P.conj().T) / 2
        if keep_history:
            history.append((u0 + b * du, Phi.copy()))
    log.debug("iso_flow: max Hermiticity drift %.3e", drift)
    return FlowState(u1, Phi, drift, tuple(history))


def conservation_residuals(Phi_start, Phi_end):
    """Changes of the spectrum and of the diagonal along a flow."""
    w0 = np.linalg.eigvalsh(as_hermitian(Phi_start))
    w1 = np.linalg.eigvalsh(as_hermitian(Phi_end))
    return {"spectrum": float(np.abs(w0 - w1).max()),
            "diagonal": float(np.abs(np.diag(Phi_start) - np.diag(Phi_end)).max())}


def _delta(A, k):
    D = np.diag(np.diag(A)).astype(complex)
    D[:k, :k] = A[:k, :k]
    return D


def g_factor(u, A):
    """Dressing g(u; A) = (1/(u₂−u₁))^{δ₁(A)/2πi} Π_k ((u_k−u_{k−1})/(u_{k+1}−u_k))^{δ_k(A)/2πi}.

    δ_k(A) keeps the leading k×k block and the diagonal of A. Unitary.
    """
    u = _check_chamber(u)
    A = as_hermitian(A)
    n = u.size
    g = np.eye(n, dtype=complex)
    if n < 2:
        return g
    g = ratio_power(1.0 / (u[1] - u[0]), _delta(A, 1))
    for k in range(2, n):
        ratio = (u[k - 1] - u[k - 2]) / (u[k] - u[k - 1])
        g = g @ ratio_power(ratio, _delta(A, k))
    return g


def ratio_angles(u, A, gap_tol=None):
    """Torus element θ₁(u, A) with Ad_{g(u;A)} = X_{θ₁} on the open cone.

    Level i, index j: [(A_ii − λ^(i)_j) log(u_i − u_{i−1}) + (λ^(i)_j − A_{i+1,i+1}) log(u_{i+1} − u_i)] / 2π,
    the first term absent for i = 1.
    """
    u = _check_chamber(u)
    A = as_hermitian(A)
    table = require_cone(A, gap_tol=gap_tol)
    d = np.diag(A).real
    levels = []
    for i in range(1, u.size):
        lam = table.level(i)
        t = (lam - d[i]) * np.log(u[i] - u[i - 1])
        if i > 1:
            t = t + (d[i - 1] - lam) * np.log(u[i - 1] - u[i - 2])
        levels.append(t / (2 * np.pi))
    return TorusElement(tuple(levels))


def psi_u(u, A, method="gauge", gap_tol=None):
    """The Thimm transformation ψ(u, A) = X_θ⁻¹(Ad_{g(u;A)} A).

    Parameters
    ----------
    method : {"gauge", "angles"}
        "gauge" conjugates by g and undoes θ; "angles" applies X_φ with
        φ = θ₁(u, A) − θ(A) directly.
    """
    A = as_hermitian(A)
    theta = phase_theta(A, gap_tol=gap_tol)
    if method == "gauge":
        g = g_factor(u, A)
        B = g @ A @ g.conj().T
        return thimm_act_full(-theta, (B + B.conj().T) / 2, gap_tol=gap_tol)
    if method == "angles":
        return thimm_act_full(ratio_angles(u, A, gap_tol) - theta, A, gap_tol=gap_tol)
    raise ValueError(f"unknown method {method!r}")


def min_ratio(u):
    """Smallest consecutive gap ratio (u_{k+1}−u_k)/(u_k−u_{k−1}); inf for n ≤ 2."""
    d = np.diff(np.asarray(u, dtype=float))
    return float((d[1:] / d[:-1]).min()) if d.size > 1 else np.inf


@dataclass(frozen=True)
class DecayReport:
    us: tuple
    ratios: np.ndarray
    errors: np.ndarray
    slope: float
    oracle_residuals: tuple

    def csv_rows(self):
        return [(float(r), float(e)) for r, e in zip(self.ratios, self.errors)]


def mainthm_error(u, A, cfg=None):
    """‖Γ_AM(ψ(u, A)) − ν_oracle(u, A)‖ (Frobenius) and the oracle residuals."""
    res = stokes_numeric(LinearSystem(u, A), cfg or OracleConfig())
    nu = res.s_plus.conj().T @ res.s_plus
    err = float(np.linalg.norm(gamma_am(psi_u(u, A)).gamma - nu))
    return err, res.residuals


def fit_loglog_slope(x, y):
    x, y = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def verify_mainthm(A, schedule, cfg=None, scale="s"):
    """Measure the decay of ‖Γ_AM(ψ(u, A)) − ν(u, A)‖ along a schedule.

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian matrix in the open cone (n ≤ 3 for desk-scale cost).
    schedule : sequence of u
    scale : {"s", "ratio"}
        Abscissa of the log-log fit: the last entry of u, or the minimum
        gap ratio.

    Returns
    -------
    DecayReport
        ``slope`` is NaN when fewer than two points are given or n = 2
        (no ratio; the identity is then exact).
    """
    A = as_hermitian(A)
    require_cone(A)
    errs, resids, xs = [], [], []
    for u in schedule:
        e, r = mainthm_error(u, A, cfg)
        errs.append(e)
        resids.append(r)
        xs.append(u[-1] if scale == "s" else min_ratio(u))
    errs = np.array(errs)
    xs = np.array(xs, dtype=float)
    slope = np.nan
    if len(errs) >= 2 and A.shape[0] > 2:
        slope = fit_loglog_slope(xs, errs)
    ratios = np.array([min_ratio(u) for u in schedule])
    return DecayReport(tuple(np.asarray(u, dtype=float) for u in schedule), ratios, errs, slope, tuple(resids))


@dataclass(frozen=True)
class BoundaryFit:
    estimate: np.ndarray
    residual: float
    dressed: tuple


def boundary_fit(samples):
    """Estimate the boundary value Φ₀ from flow samples (u, Φ(u)).

    Each sample is undressed, Φ₀ ≈ Ad_{g(u;Φ)} Φ, and the undressed
    matrices are extrapolated linearly in 1/ratio (n ≥ 3) or averaged
    (n = 2, where the undressing is exact).

    Returns
    -------
    BoundaryFit
        ``residual`` is the spread between the last two undressed samples.
    """
    if len(samples) < 2:
        raise ValueError("boundary_fit needs at least two samples")
    dressed = []
    for u, Phi in samples:
        g = g_factor(u, Phi)
        B = g @ as_hermitian(Phi) @ g.conj().T
        dressed.append((B + B.conj().T) / 2)
    stack = np.array(dressed)
    n = stack.shape[1]
    if n <= 2:
        est = stack.mean(axis=0)
    else:
        x = np.array([1.0 / min_ratio(u) for u, _ in samples])
        V = np.vstack([np.ones_like(x), x]).T
        coef, *_ = np.linalg.lstsq(V, stack.reshape(len(x), -1), rcond=None)
        est = coef[0].reshape(n, n)
    est = (est + est.conj().T) / 2
    residual = float(np.linalg.norm(dressed[-1] - dressed[-2]))
    return BoundaryFit(est, residual, tuple(dressed))
