"""Gelfand-Tsetlin map, action-angle coordinates and Thimm torus actions.

Conventions
-----------
Levels are 1-based (level k is the leading k×k block); array indices are
0-based. ``table.level(k)[i]`` is λ^(k)_{i+1}. Eigenvalues are stored in
descending order.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AngleUndefinedError, ConeViolationError
from .linalg import as_hermitian, embed, hermitian_eigen_desc, minor_det

TWO_PI = 2 * np.pi
MOD_TOL = 1e-10


# ---------------------------------------------------------------------------
# spectra and the cone

@dataclass(frozen=True)
class SpectrumTable:
    """Triangular array of leading-block spectra.

    Attributes
    ----------
    rows : tuple of ndarray
        ``rows[k-1]`` holds the k eigenvalues of the leading k×k block,
        in descending order.
    """

    rows: tuple

    @property
    def n(self):
        return len(self.rows)

    def level(self, k):
        """Eigenvalues at level `k`; level 0 is the empty row."""
        if k == 0:
            return np.empty(0)
        return self.rows[k - 1]

    def gaps(self):
        """Smallest interlacing gap between levels k and k+1, for k = 1..n-1."""
        out = []
        for k in range(1, self.n):
            lo, hi = self.level(k), self.level(k + 1)
            out.append(min(np.min(hi[:-1] - lo), np.min(lo - hi[1:])))
        return np.array(out)

    def interlaces(self, tol=1e-10):
        g = self.gaps()
        return bool(np.all(g >= -tol)) if g.size else True

    def tolist(self):
        return [r.tolist() for r in self.rows]

    @classmethod
    def from_rows(cls, rows):
        return cls(tuple(np.asarray(r, dtype=float) for r in rows))


def gt_map(A):
    """Descending spectra of all leading principal blocks of `A`."""
    A = as_hermitian(A)
    n = A.shape[0]
    return SpectrumTable(tuple(hermitian_eigen_desc(A[:k, :k])[0] for k in range(1, n + 1)))


def default_gap_tol(A):
    return 1e-8 * (1 + np.linalg.norm(A, 2))


def in_open_cone(table, gap_tol=0.0):
    """True iff every interlacing inequality holds strictly by more than `gap_tol`."""
    g = table.gaps()
    return bool(np.all(g > gap_tol))


def require_cone(A, upto=None, gap_tol=None):
    """Return ``gt_map(A)`` after checking strict interlacing.

    Parameters
    ----------
    upto : int, optional
        Highest level involved; gaps between levels k-1 and k are checked
        for k ≤ `upto`. Defaults to n.

    Raises
    ------
    ConeViolationError
        Naming the lowest offending level.
    """
    A = as_hermitian(A)
    table = gt_map(A)
    if gap_tol is None:
        gap_tol = default_gap_tol(A)
    upto = table.n if upto is None else upto
    for k, g in enumerate(table.gaps()[: max(upto - 1, 0)], start=2):
        if not g > gap_tol:
            raise ConeViolationError(k, g, gap_tol)
    return table


# ---------------------------------------------------------------------------
# P_k, a-coefficients, normalizers, ladders

def _p_block_eigen(A, k):
    _, V = hermitian_eigen_desc(A[:k, :k])
    row = V[k - 1]
    return V / (row / np.abs(row))[None, :]


def _p_block_minor(A, table, k):
    lam, mu = table.level(k), table.level(k - 1)
    n = A.shape[0]
    V = np.empty((k, k), dtype=complex)
    rows = list(range(k - 1))
    for j in range(k):
        M = A - lam[j] * np.eye(n)
        den = np.prod(np.delete(lam[j] - lam, j)) * np.prod(lam[j] - mu)
        for i in range(k):
            cols = [c for c in range(k) if c != i]
            V[i, j] = (-1) ** (i + j) * minor_det(M, rows, cols)
        V[:, j] /= np.sqrt(den)
    return V


def diagonalizer_P(A, k, method="eigen", gap_tol=None):
    """The unitary P_k(A) with positive k-th row diagonalizing the k-th block.

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian matrix in the open cone up to level `k`.
    k : int
        Level, ``1 ≤ k ≤ n``.
    method : {"eigen", "minor"}
        Eigen-solver path, or the closed cofactor formula.

    Returns
    -------
    (n, n) ndarray
        Identity outside the leading k×k block.
    """
    A = as_hermitian(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"level {k} out of range 1..{n}")
    table = require_cone(A, upto=k, gap_tol=gap_tol)
    if k == 1:
        return np.eye(n, dtype=complex)
    if method == "eigen":
        block = _p_block_eigen(A, k)
    elif method == "minor":
        block = _p_block_minor(A, table, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    return embed(block, n)


def gt_a_coeffs(A, k, method="eigen", gap_tol=None):
    """Off-block coefficients a^(k)_i = (P_k⁻¹ A P_k)_{i,k+1}, i = 1..k."""
    A = as_hermitian(A)
    n = A.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"level {k} out of range 1..{n - 1}")
    table = require_cone(A, upto=k + 1, gap_tol=gap_tol)
    if method == "eigen":
        P = diagonalizer_P(A, k, gap_tol=gap_tol)
        return (P.conj().T @ A[:, k])[:k]
    if method != "minor":
        raise ValueError(f"unknown method {method!r}")
    lam, mu = table.level(k), table.level(k - 1)
    rows = list(range(k))
    cols = list(range(k - 1)) + [k]
    out = np.empty(k, dtype=complex)
    for i in range(k):
        den = np.prod(np.delete(lam[i] - lam, i)) * np.prod(lam[i] - mu)
        out[i] = (-1) ** (k + i + 1) * minor_det(A - lam[i] * np.eye(n), rows, cols) / np.sqrt(den)
    return out


def moduli_squared(table, k):
    """|a^(k)_i|² from the spectra alone (characteristic-polynomial identity)."""
    lam, lp = table.level(k), table.level(k + 1)
    return np.array([-np.prod(lam[i] - lp) / np.prod(np.delete(lam[i] - lam, i))
                     for i in range(k)])


def normalizer_N(table, k1, j, with_check=False):
    """Normalizer N_j^(k1) of the ladder matrix L^(k1).

    Evaluates both the defining sum ``sqrt(1 + Σ|a_l|²/(λ^(k1-1)_l − λ^(k1)_j)²)``
    (with |a_l|² taken from the spectra) and the product closed form, and
    returns the latter. `j` is 0-based.

    Returns
    -------
    float, or (float, float) if `with_check`
        The normalizer and, optionally, the discrepancy between the two forms.
    """
    k = k1 - 1
    lam, lp = table.level(k), table.level(k1)
    closed = np.sqrt(np.prod(np.delete(lp[j] - lp, j)) / np.prod(lp[j] - lam))
    if not with_check:
        return float(closed)
    summed = np.sqrt(1 + np.sum(moduli_squared(table, k) / (lam - lp[j]) ** 2)) if k else 1.0
    return float(closed), float(abs(closed - summed))


def normalizers(table, k1):
    return np.array([normalizer_N(table, k1, j) for j in range(k1)])


def ladder_L(A, k1, gap_tol=None):
    """Ladder matrix L^(k1) with ``P_{k1} = P_{k1-1} L^(k1)``; identity outside the k1 block."""
    A = as_hermitian(A)
    n = A.shape[0]
    if not 2 <= k1 <= n:
        raise ValueError(f"level {k1} out of range 2..{n}")
    table = require_cone(A, gap_tol=gap_tol)
    a = gt_a_coeffs(A, k1 - 1, gap_tol=gap_tol)
    return embed(_ladder_block(table, k1, a), n)


def _ladder_block(table, k1, a):
    mu, lam = table.level(k1 - 1), table.level(k1)
    N = normalizers(table, k1)
    L = np.empty((k1, k1), dtype=complex)
    L[:-1] = a[:, None] / (lam[None, :] - mu[:, None]) / N[None, :]
    L[-1] = 1 / N
    return L


# ---------------------------------------------------------------------------
# torus elements and Thimm actions

@dataclass(frozen=True)
class TorusElement:
    """Element of T(1)×…×T(n-1) given by angles, one array per level.

    ``angles[k-1]`` has length k. Angles are reduced to [0, 2π).
    """

    angles: tuple = field()

    def __post_init__(self):
        red = tuple(np.mod(np.asarray(a, dtype=float), TWO_PI) for a in self.angles)
        object.__setattr__(self, "angles", red)

    @property
    def n(self):
        return len(self.angles) + 1

    def level(self, k):
        return self.angles[k - 1]

    def __add__(self, other):
        return TorusElement(tuple(a + b for a, b in zip(self.angles, other.angles)))

    def __neg__(self):
        return TorusElement(tuple(-a for a in self.angles))

    def __sub__(self, other):
        return self + (-other)

    def tolist(self):
        return [a.tolist() for a in self.angles]

    @classmethod
    def zeros(cls, n):
        return cls(tuple(np.zeros(k) for k in range(1, n)))

    @classmethod
    def random(cls, n, rng):
        return cls(tuple(rng.uniform(0, TWO_PI, size=k) for k in range(1, n)))


def angle_distance(a, b):
    """Elementwise distance on the circle."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def thimm_act(theta_k, k, A, gap_tol=None):
    """Action of the level-`k` torus: ``Ad(P_k t P_k⁻¹) A`` with ``t = diag(e^{iθ})``.

    Preserves all spectra and shifts the level-k angles by `theta_k`.
    """
    A = as_hermitian(A)
    theta_k = np.asarray(theta_k, dtype=float)
    if theta_k.shape != (k,):
        raise ValueError(f"level {k} needs {k} angles, got shape {theta_k.shape}")
    P = diagonalizer_P(A, k, gap_tol=gap_tol)
    t = np.ones(A.shape[0], dtype=complex)
    t[:k] = np.exp(1j * theta_k)
    U = (P * t[None, :]) @ P.conj().T
    out = U @ A @ U.conj().T
    return (out + out.conj().T) / 2


def thimm_act_full(theta, A, gap_tol=None):
    """The gauge map X_θ: level actions applied for k = 1, ..., n-1 in turn."""
    A = as_hermitian(A)
    if theta.n != A.shape[0]:
        raise ValueError(f"torus element for n={theta.n} applied to n={A.shape[0]}")
    for k in range(1, A.shape[0]):
        A = thimm_act(theta.level(k), k, A, gap_tol=gap_tol)
    return A


# ---------------------------------------------------------------------------
# coordinates

@dataclass(frozen=True)
class GTCoordinates:
    actions: SpectrumTable
    angles: tuple
    moduli: tuple

    def to_json(self):
        return {"actions": self.actions.tolist(),
                "angles": [np.asarray(a).tolist() for a in self.angles],
                "moduli": [np.asarray(m).tolist() for m in self.moduli]}

    @classmethod
    def from_json(cls, obj):
        return cls(SpectrumTable.from_rows(obj["actions"]),
                   tuple(np.asarray(a, dtype=float) for a in obj["angles"]),
                   tuple(np.asarray(m, dtype=float) for m in obj["moduli"]))


def gt_coordinates(A, mod_tol=MOD_TOL, gap_tol=None):
    """Action-angle coordinates of `A` on the open cone.

    Raises
    ------
    ConeViolationError
        If `A` is not in the open cone.
    AngleUndefinedError
        If some ``|a^(k)_i| < mod_tol``.
    """
    A = as_hermitian(A)
    table = require_cone(A, gap_tol=gap_tol)
    angles, moduli = [], []
    for k in range(1, A.shape[0]):
        a = gt_a_coeffs(A, k, gap_tol=gap_tol)
        m = np.abs(a)
        bad = np.flatnonzero(m < mod_tol)
        if bad.size:
            raise AngleUndefinedError(k, int(bad[0]) + 1, float(m[bad[0]]))
        angles.append(np.mod(np.angle(a), TWO_PI))
        moduli.append(m)
    return GTCoordinates(table, tuple(angles), tuple(moduli))


def rebuild(coords):
    """Reconstruct a Hermitian matrix from its GT coordinates.

    Builds the leading blocks upward: in the eigenframe of level k the
    (k+1)-block is ``[[diag λ^(k), a], [a†, d]]`` with d fixed by the
    trace, and the frame is advanced with the ladder matrix.
    """
    table = coords.actions
    n = table.n
    A = np.zeros((n, n), dtype=complex)
    A[0, 0] = table.level(1)[0]
    P = np.eye(1, dtype=complex)
    for k in range(1, n):
        lam = table.level(k)
        a = coords.moduli[k - 1] * np.exp(1j * coords.angles[k - 1])
        d = table.level(k + 1).sum() - lam.sum()
        frame = np.zeros((k + 1, k + 1), dtype=complex)
        frame[:k, :k] = np.diag(lam)
        frame[:k, k] = a
        frame[k, :k] = a.conj()
        frame[k, k] = d
        Pk = embed(P, k + 1)
        A[: k + 1, : k + 1] = Pk @ frame @ Pk.conj().T
        P = Pk @ _ladder_block(table, k + 1, a)
    return (A + A.conj().T) / 2
