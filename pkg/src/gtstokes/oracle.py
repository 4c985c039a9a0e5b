"""Direct numerical Stokes and connection data for dF/dz = (iu − A/(2πi z)) F.

Recipe
------
* At ``z = ±R`` the canonical solutions F₊ (sector centred on arg 0) and
  F₋ (centred on arg −π) are initialized from the optimally truncated
  formal solution ``(Σ Y_m z^{-m}) e^{iuz} z^{-[A]/2πi}``. On the real axis
  the exponentials are pure phases, so truncation error is uniform and
  matching is well conditioned.
* Both are carried to ``z = ±r0`` along the real axis in the interaction
  picture ``F = e^{iu(z−z0)} G`` with an embedded 8(5,3) Runge-Kutta.
* The solution at zero, ``F₀ = H(z) z^{-A/2πi}``, uses the convergent
  power series of the entire factor H, evaluated where ``|u z|`` is small.

Then ``C = F₊⁻¹F₀`` and ``C₋ = F₋⁻¹F₀`` (with F₀ continued to arg −π),
``S₊ = e^{[A]/2} C₋ C⁻¹`` and, through the monodromy of F₀,
``S₋ = C e^{A} C₋⁻¹ e^{-[A]/2}``. Unitarity of C, triangularity of S₊ and
``S₋ = S₊†`` are emergent and reported as residuals.

Shifting u by a multiple of the identity multiplies every solution by a
scalar exponential and leaves C and S± unchanged, so u is centred first.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ChamberError, OracleError
from .linalg import TWO_PI_I, as_hermitian, expm_hermitian, hermitian_eigen_desc, unitarity_residual


@dataclass(frozen=True)
class LinearSystem:
    """The pair (u, A). `u` must be strictly increasing unless `chamber` is False."""

    u: np.ndarray
    A: np.ndarray
    chamber: bool = True
    u_gap_tol: float = 1e-9

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        A = as_hermitian(self.A)
        if A.shape != (u.size, u.size):
            raise ValueError(f"u has {u.size} entries but A is {A.shape}")
        if self.chamber and u.size > 1 and not np.all(np.diff(u) > self.u_gap_tol):
            raise ChamberError(f"u must be strictly increasing, got {u}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "A", A)

    @property
    def n(self):
        return self.u.size

    def centred(self):
        c = (self.u.max() + self.u.min()) / 2
        return LinearSystem(self.u - c, self.A, self.chamber, self.u_gap_tol)

    def min_gap(self):
        d = np.abs(self.u[:, None] - self.u[None, :])
        d = d[d > self.u_gap_tol]
        return d.min() if d.size else np.inf


@dataclass(frozen=True)
class OracleConfig:
    """Numerical knobs; ``None`` picks a default from the system.

    R defaults to 40/min-gap(u); r0 to min(1, 4/max|u|) after centring.
    """

    R: float = None
    r0: float = None
    rtol: float = 1e-11
    atol: float = 1e-13
    series_tol: float = 1e-17
    max_terms: int = 400
    match_tol: float = 1e-9

    def radius(self, system):
        if self.R is not None:
            return float(self.R)
        g = system.min_gap()
        return 40.0 / g if np.isfinite(g) else 40.0

    def inner(self, system):
        if self.r0 is not None:
            return float(self.r0)
        umax = np.abs(system.u).max()
        return min(1.0, 4.0 / umax) if umax > 0 else 1.0


def _branch_log(z, which):
    """log z with arg in (−π, π] for 'plus' and in (−2π, 0] for 'minus'."""
    z = complex(z)
    if z == 0:
        raise OracleError("log evaluated at the origin")
    arg = np.angle(z)
    if which == "minus" and arg > 0:
        arg -= 2 * np.pi
    return np.log(abs(z)) + 1j * arg


# ---------------------------------------------------------------------------
# integration

def integrate_linear(system, z_from, z_to, F_init, rtol=1e-11, atol=1e-13):
    """Propagate a fundamental solution along the segment [z_from, z_to].

    Parameters
    ----------
    system : LinearSystem
    z_from, z_to : complex
        Segment end points; the segment must avoid the origin.
    F_init : (n, n) array_like
        Value at `z_from`.

    Returns
    -------
    (n, n) ndarray
        The solution at `z_to`.
    """
    z0, z1 = complex(z_from), complex(z_to)
    dz = z1 - z0
    if dz == 0:
        return np.array(F_init, dtype=complex)
    # distance from origin to the segment
    s = np.clip(-(z0 * np.conj(dz)).real / abs(dz) ** 2, 0, 1)
    if abs(z0 + s * dz) < 1e-14 * max(abs(z0), abs(z1), 1.0):
        raise OracleError("integration path passes through the origin")
    n = system.n
    u = system.u
    B = -system.A / TWO_PI_I

    def rhs(t, y):
        z = z0 + t * dz
        ph = np.exp(1j * u * (t * dz))
        M = (B / z) * ph[None, :] / ph[:, None]
        return ((M @ y.reshape(n, n)) * dz).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), np.asarray(F_init, dtype=complex).ravel(),
                    method="DOP853", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise OracleError(f"integration failed: {sol.message}")
    G = sol.y[:, -1].reshape(n, n)
    return np.exp(1j * u * dz)[:, None] * G


# ---------------------------------------------------------------------------
# canonical solutions at infinity

def _formal_value(system, z, logz, cfg):
    """Optimally truncated formal solution at z; returns (F, last term size)."""
    n = system.n
    u = system.u
    B = system.A / TWO_PI_I
    Bd = np.diag(B)
    du = u[:, None] - u[None, :]
    same = np.abs(du) <= system.u_gap_tol
    off_block = np.where(same & ~np.eye(n, dtype=bool), B, 0)
    if np.abs(off_block).max(initial=0.0) > 1e-12 * (1 + np.abs(B).max()):
        raise OracleError("residue is not diagonal on a degenerate eigenspace of u")
    den_same = Bd[:, None] - Bd[None, :]
    Y = np.eye(n, dtype=complex)
    S = Y.copy()
    best = np.inf
    for m in range(cfg.max_terms):
        rhs = -m * Y + (B @ Y - Y * Bd[None, :])
        Ynew = np.zeros((n, n), dtype=complex)
        Ynew[~same] = rhs[~same] / (1j * du[~same])
        s = B @ np.where(same, 0, Ynew)
        Ynew[same] = -s[same] / (den_same[same] - (m + 1))
        term = Ynew * z ** (-(m + 1))
        size = np.abs(term).max()
        if size > best and m > 2:
            break
        S = S + term
        best = min(best, size)
        Y = Ynew
        if size < cfg.series_tol:
            break
    diag = np.exp(1j * u * z - Bd * logz)
    return S * diag[None, :], best


class CanonicalSolution:
    """Canonical sectorial solution F₊ or F₋, evaluable by integration.

    The anchor is ``z = +R`` (plus) or ``z = −R`` with arg −π (minus).
    """

    def __init__(self, system, cfg=None, which="plus"):
        if which not in ("plus", "minus"):
            raise ValueError(f"which must be 'plus' or 'minus', got {which!r}")
        self.system = system.centred()
        self.cfg = cfg or OracleConfig()
        self.which = which
        R = self.cfg.radius(self.system)
        self.anchor = complex(R if which == "plus" else -R)
        F, err = _formal_value(self.system, self.anchor, _branch_log(self.anchor, which), self.cfg)
        if err > self.cfg.match_tol:
            raise OracleError(f"matching radius R={R:g} too small (truncation error {err:.2e})")
        self.anchor_value = F
        self.truncation_error = err

    def at(self, z):
        return integrate_linear(self.system, self.anchor, z, self.anchor_value,
                                self.cfg.rtol, self.cfg.atol)

    def asymptotic_residual(self, z):
        """‖F(z) F̂(z)⁻¹ − I‖ against the truncated formal solution at z."""
        F_hat, _ = _formal_value(self.system, complex(z), _branch_log(z, self.which), self.cfg)
        return float(np.abs(self.at(z) @ np.linalg.inv(F_hat) - np.eye(self.system.n)).max())


def canonical_plus(system, cfg=None):
    return CanonicalSolution(system, cfg, "plus")


def canonical_minus(system, cfg=None):
    return CanonicalSolution(system, cfg, "minus")


# ---------------------------------------------------------------------------
# solution at zero

class SolutionAtZero:
    """F₀(z) = H(z) z^{-A/2πi} with H entire and H(0) = I.

    H solves ``m H_m + [A/2πi, H_m] = iu H_{m-1}``, solved entrywise in
    the eigenbasis of A. The series is summed where ``|u z| ≤ 8``;
    farther points are reached by integration from radius r0.
    """

    def __init__(self, system, cfg=None):
        self.system = system.centred()
        self.cfg = cfg or OracleConfig()
        w, V = hermitian_eigen_desc(self.system.A)
        self._w, self._V = w, V
        self._Ut = V.conj().T @ (1j * self.system.u[:, None] * V)
        self._den = (w[:, None] - w[None, :]) / TWO_PI_I

    def _series(self, z, logz):
        H = np.eye(self.system.n, dtype=complex)
        S = H.copy()
        for m in range(1, self.cfg.max_terms):
            H = (self._Ut @ H) / (m + self._den)
            t = H * z ** m
            S = S + t
            if m > 5 and np.abs(t).max() < 1e-18:
                break
        V = self._V
        return V @ S @ (np.exp(-self._w / TWO_PI_I * logz)[:, None] * V.conj().T)

    def at(self, z, which="plus"):
        z = complex(z)
        logz = _branch_log(z, which)
        umax = np.abs(self.system.u).max()
        if abs(z) * umax <= 8:
            return self._series(z, logz)
        r0 = self.cfg.inner(self.system)
        z_in = r0 * z / abs(z)
        F_in = self._series(z_in, _branch_log(z_in, which))
        return integrate_linear(self.system, z_in, z, F_in, self.cfg.rtol, self.cfg.atol)


def solution_at_zero(system, cfg=None):
    return SolutionAtZero(system, cfg)


# ---------------------------------------------------------------------------
# connection and Stokes matrices

@dataclass(frozen=True)
class OracleResult:
    u: np.ndarray
    A: np.ndarray
    c: np.ndarray
    c_minus: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    residuals: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self):
        from .jsonio import matrix_to_json
        return {"u": self.u.tolist(),
                "s_plus": matrix_to_json(self.s_plus),
                "c": matrix_to_json(self.c),
                "residuals": dict(self.residuals),
                "config": dict(self.config)}


def _connections(system, cfg):
    r0 = cfg.inner(system.centred())
    Fp = canonical_plus(system, cfg)
    F0 = solution_at_zero(system, cfg)
    C = np.linalg.solve(Fp.at(r0), F0.at(r0, "plus"))
    return C, Fp, F0, r0


def connection_numeric(system, cfg=None):
    """Connection matrix C = F₊(z)⁻¹ F₀(z) and its unitarity residual.

    Works for degenerate u (e.g. u = E_k) as long as A is diagonal on each
    repeated eigenspace of u; pass ``LinearSystem(..., chamber=False)``.
    """
    cfg = cfg or OracleConfig()
    C, *_ = _connections(system, cfg)
    return C, unitarity_residual(C)


def stokes_numeric(system, cfg=None):
    """Stokes and connection matrices of a system in the chamber u₁ < … < u_n.

    Returns
    -------
    OracleResult
        Residuals: ``unitarity`` ‖CC†−I‖, ``triangularity`` max below-diagonal
        |S₊| relative to ‖S₊‖, ``monodromy`` ‖C e^A C⁻¹ − S₊†S₊‖ and
        ``hermitian`` max|S₋ − S₊†|.
    """
    if not system.chamber:
        raise ChamberError("Stokes matrices need u in the chamber u_1 < ... < u_n")
    cfg = cfg or OracleConfig()
    C, Fp, F0, r0 = _connections(system, cfg)
    Fm = canonical_minus(system, cfg)
    Cm = np.linalg.solve(Fm.at(-r0), F0.at(-r0, "minus"))
    A = system.A
    half = np.exp(np.diag(A).real / 2)
    S_plus = half[:, None] * (Cm @ np.linalg.inv(C))
    eA = expm_hermitian(A)
    S_minus = (C @ eA @ np.linalg.inv(Cm)) / half[None, :]
    residuals = {
        "unitarity": unitarity_residual(C),
        "triangularity": float(np.abs(np.tril(S_plus, -1)).max(initial=0.0) / np.linalg.norm(S_plus)),
        "monodromy": float(np.linalg.norm(C @ eA @ np.linalg.inv(C) - S_plus.conj().T @ S_plus)),
        "hermitian": float(np.abs(S_minus - S_plus.conj().T).max()),
        "truncation": float(max(Fp.truncation_error, Fm.truncation_error)),
    }
    config = {"R": abs(Fp.anchor), "r0": r0, "rtol": cfg.rtol, "atol": cfg.atol}
    return OracleResult(system.u, A, C, Cm, S_plus, S_minus, residuals, config)


def run_oracle(u, A, cfg=None):
    return stokes_numeric(LinearSystem(u, A), cfg)
