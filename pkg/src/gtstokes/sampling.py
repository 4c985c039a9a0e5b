"""Random inputs for the verification suites."""

import numpy as np

from .gt import TorusElement, gt_map


def cone_margin(A):
    """Smallest interlacing gap of `A` relative to 1 + ‖A‖₂."""
    g = gt_map(A).gaps()
    return float(g.min()) / (1 + np.linalg.norm(A, 2)) if g.size else np.inf


def default_margin(n):
    """Rejection margin: 0.05 up to n = 3, shrinking like 1/n² beyond.

    Typical interlacing gaps of a unit-variance sample shrink like 1/n², so
    a fixed margin would reject almost every draw at n ≥ 6.
    """
    return 0.05 * min(1.0, (3.0 / n) ** 2) if n > 0 else 0.05


def random_herm0(n, rng, margin=None, max_norm=None, real=False, max_tries=10000):
    """Draw A = (G + G†)/2 with unit-variance entries, rejecting near the cone boundary.

    Parameters
    ----------
    n : int
    rng : numpy.random.Generator
    margin : float, optional
        Reject unless every interlacing gap is at least ``margin·(1 + ‖A‖₂)``;
        defaults to :func:`default_margin`.
    max_norm : float, optional
        Rescale so that ‖A‖₂ is uniform in ``[max_norm/2, max_norm]``.
    real : bool
        Draw from the real symmetric matrices.
    """
    if margin is None:
        margin = default_margin(n)
    for _ in range(max_tries):
        G = rng.standard_normal((n, n))
        if not real:
            G = G + 1j * rng.standard_normal((n, n))
        A = (G + G.conj().T) / 2
        if max_norm is not None and n > 0:
            nrm = np.linalg.norm(A, 2)
            if nrm == 0:
                continue
            A = A * (max_norm * rng.uniform(0.5, 1.0) / nrm)
        if cone_margin(A) >= margin:
            return A if real else A.astype(complex)
    raise RuntimeError(f"no sample with cone margin {margin} after {max_tries} draws")


def random_torus(n, rng):
    return TorusElement.random(n, rng)


def sample_batch(n, count, seed, **kw):
    rng = np.random.default_rng(seed)
    return [random_herm0(n, rng, **kw) for _ in range(count)]
