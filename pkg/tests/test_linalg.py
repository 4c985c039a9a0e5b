import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from gtstokes.errors import FactorizationError, FormulaDomainError, NotHermitianError
from gtstokes.linalg import (as_hermitian, cholesky_upper, embed, expm_hermitian,
                             hermitian_eigen_desc, lgamma_1p, log_gamma_complex, minor_det,
                             ratio_power, unitarity_residual)

from conftest import seeds


def _gue(n, seed):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (G + G.conj().T) / 2


@given(st.integers(1, 7), seeds)
def test_eigen_reconstruction(n, seed):
    H = _gue(n, seed)
    w, V = hermitian_eigen_desc(H)
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(V @ np.diag(w) @ V.conj().T - H) <= 1e-11 * (1 + np.linalg.norm(H, 2))


def test_eigen_degenerate_allowed():
    w, V = hermitian_eigen_desc(np.eye(3))
    np.testing.assert_allclose(w, 1.0)
    assert unitarity_residual(V) < 1e-14


def test_not_hermitian():
    with pytest.raises(NotHermitianError):
        as_hermitian([[0, 1], [0, 0]])
    with pytest.raises(NotHermitianError):
        as_hermitian(np.zeros((2, 3)))


def test_as_hermitian_symmetrizes_roundoff():
    H = np.array([[1.0, 2 + 1e-15j], [2, 3]])
    out = as_hermitian(H)
    assert np.array_equal(out, out.conj().T)


@given(st.integers(1, 6), seeds)
def test_minor_full_set_is_det(n, seed):
    H = _gue(n, seed)
    d = np.linalg.det(H)
    assert abs(minor_det(H, range(n), range(n)) - d) <= 1e-12 * max(1.0, abs(d))


def test_minor_examples():
    A = np.arange(9.0).reshape(3, 3) + np.eye(3)
    assert minor_det(A, [], []) == 1
    assert minor_det(A, [0, 2], [1, 2]) == pytest.approx(1 * 9 - 2 * 7)
    with pytest.raises(ValueError):
        minor_det(A, [0], [0, 1])


@pytest.mark.parametrize("z", [0.5, 1 + 1j, -2.5 + 0.3j, 3.7 - 4.1j, 10j, 0.1 - 0.01j, -7.5 + 1e-3j])
def test_log_gamma_against_mpmath(z):
    ref = complex(mpmath.loggamma(mpmath.mpc(z.real if isinstance(z, complex) else z,
                                             z.imag if isinstance(z, complex) else 0)))
    assert abs(log_gamma_complex(z) - ref) <= 1e-13 * max(1.0, abs(ref))


@given(st.floats(-60, 60))
def test_lgamma_1p_against_mpmath(r):
    ref = complex(mpmath.loggamma(1 + mpmath.mpf(r) / (2j * mpmath.pi)))
    assert abs(complex(lgamma_1p(r)) - ref) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(-50, 50))
def test_gamma_modulus_identity(r):
    # |Γ(1 + r/2πi)|² = (r/2)/sinh(r/2)
    lhs = 2 * lgamma_1p(r).real
    x = mpmath.mpf(r) / 2
    rhs = 0.0 if r == 0 else float(mpmath.log(x / mpmath.sinh(x)))
    assert lhs == pytest.approx(rhs, abs=1e-11)


def test_gamma_reflection(rng):
    for _ in range(100):
        z = complex(*rng.uniform(-3.5, 3.5, 2))
        if abs(z.imag) < 1e-3 and abs(z.real - round(z.real)) < 1e-3:
            continue
        assert abs(gamma_fn(z) * gamma_fn(1 - z) - np.pi / np.sin(np.pi * z)) <= 1e-10


def test_log_gamma_pole():
    with pytest.raises(FormulaDomainError):
        log_gamma_complex(np.array([1.0, -3.0]))


@given(st.integers(1, 6), seeds)
def test_cholesky_roundtrip(n, seed):
    H = _gue(n, seed)
    M = H @ H + np.eye(n)
    R = cholesky_upper(M)
    assert np.allclose(np.tril(R, -1), 0)
    assert np.all(np.diag(R).real > 0)
    assert np.linalg.norm(R.conj().T @ R - M) <= 1e-12 * np.linalg.norm(M) * 10


def test_cholesky_failure_names_pivot():
    M = np.diag([1.0, 2.0, -1.0])
    with pytest.raises(FactorizationError) as exc:
        cholesky_upper(M)
    assert exc.value.pivot == 3


@pytest.mark.parametrize("x", [0.3, 1.0, 17.0])
def test_ratio_power_unitary(x):
    H = _gue(4, 5)
    U = ratio_power(x, H)
    assert unitarity_residual(U) < 1e-12
    if x == 1.0:
        np.testing.assert_allclose(U, np.eye(4), atol=1e-14)


def test_ratio_power_multiplicative():
    H = _gue(3, 9)
    np.testing.assert_allclose(ratio_power(2.0, H) @ ratio_power(3.0, H), ratio_power(6.0, H), atol=1e-13)


def test_ratio_power_bad_base():
    with pytest.raises(FormulaDomainError):
        ratio_power(-1.0, np.eye(2))


def test_expm_and_embed():
    H = _gue(3, 2)
    np.testing.assert_allclose(np.linalg.det(expm_hermitian(H)), np.exp(np.trace(H)), rtol=1e-12)
    E = embed(np.array([[2.0]]), 3)
    assert E[0, 0] == 2 and E[2, 2] == 1
