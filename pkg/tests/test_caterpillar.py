import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtstokes.caterpillar import (connection_product, decompose_DLR, extract_stokes,
                                  normalized_connection, rh_caterpillar, stokes_subdiag,
                                  verify_monodromy)
from gtstokes.errors import ConeViolationError
from gtstokes.gt import diagonalizer_P, gt_map, thimm_act_full
from gtstokes.linalg import unitarity_residual
from gtstokes.sampling import random_torus

from conftest import A2, A3, herm0, seeds

sizes = st.integers(2, 5)

# S₊ of A2 at u = (0, 1), from the direct ODE oracle at rtol 1e-13
S_PLUS_A2 = np.array([[1.1618342427283, 0.4017205341032 - 0.1659449296687j],
                      [0.0, 0.7788007830714]])


def test_n2_matches_frozen_oracle():
    # at n = 2 the caterpillar point is every u, so the match is exact
    S = rh_caterpillar(A2).stokes.s_plus
    np.testing.assert_allclose(S, S_PLUS_A2, atol=1e-12)


@given(sizes, seeds)
def test_connections_unitary(n, seed):
    A = herm0(n, seed)
    for k1 in range(2, n + 1):
        C = normalized_connection(A, k1)
        assert unitarity_residual(C) < 1e-9
        np.testing.assert_array_equal(C[k1:, k1:], np.eye(n - k1))
    assert unitarity_residual(connection_product(A)) < 1e-9


@given(sizes, seeds)
def test_nu_positive_with_gt_log_spectra(n, seed):
    A = herm0(n, seed)
    res = rh_caterpillar(A)
    assert np.linalg.eigvalsh(res.nu).min() > 0
    table = gt_map(A)
    for k in range(1, n + 1):
        w = np.linalg.eigvalsh(res.nu[:k, :k])[::-1]
        np.testing.assert_allclose(np.log(w), table.level(k), atol=1e-8)


@given(sizes, seeds)
def test_thimm_equivariance(n, seed):
    A = herm0(n, seed)
    t = random_torus(n, np.random.default_rng(seed))
    lhs = rh_caterpillar(thimm_act_full(t, A)).nu
    rhs = thimm_act_full(t, rh_caterpillar(A).nu)
    assert np.linalg.norm(lhs - rhs) < 1e-8


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("seed", range(8))
def test_subdiagonals_closed_form(n, seed):
    A = herm0(n, 100 + seed)
    res = rh_caterpillar(A)
    S = res.stokes.s_plus
    for k, (sp, sm) in enumerate(stokes_subdiag(A)):
        assert abs(sp - S[k, k + 1]) < 1e-8
        assert abs(sm - np.conj(S[k, k + 1])) < 1e-8
    assert res.diagnostics["diag_residual"] < 1e-8
    assert res.diagnostics["monodromy"] < 1e-8


@given(sizes, seeds)
def test_dlr_decomposition(n, seed):
    A = herm0(n, seed)
    B = thimm_act_full(random_torus(n, np.random.default_rng(seed)), A)
    for k1 in range(2, n + 1):
        f, g = decompose_DLR(A, k1), decompose_DLR(B, k1)
        np.testing.assert_allclose(f.product(), normalized_connection(A, k1), atol=1e-9)
        # R and the moduli of the Gamma diagonals depend on the actions only
        np.testing.assert_allclose(f.r, g.r, atol=1e-12)
        np.testing.assert_allclose(np.abs(f.d_left), np.abs(g.d_left), atol=1e-12)
        np.testing.assert_allclose(np.abs(f.d_right), np.abs(g.d_right), atol=1e-12)
        assert np.isrealobj(f.r)


def test_extract_stokes_diag():
    res = rh_caterpillar(A3)
    pair, resid = extract_stokes(res.nu, np.diag(A3).real)
    assert resid < 1e-12
    np.testing.assert_allclose(pair.product(), res.nu, atol=1e-12)
    np.testing.assert_allclose(np.tril(pair.s_plus, -1), 0)


def test_monodromy_matrix_frame():
    # Ĉ carries the eigenframe, so in the matrix frame one conjugates by P_n
    res = rh_caterpillar(A3)
    C = res.c_tilde @ diagonalizer_P(A3, 3).conj().T
    assert verify_monodromy(C, A3, res.stokes, frame="matrix") < 1e-12


def test_n1():
    res = rh_caterpillar(np.array([[0.7]]))
    np.testing.assert_allclose(res.nu, [[np.exp(0.7)]])
    assert stokes_subdiag(np.array([[0.7]])) == []


def test_level_out_of_range_and_boundary():
    with pytest.raises(ValueError):
        normalized_connection(A3, 1)
    with pytest.raises(ConeViolationError):
        rh_caterpillar(np.diag([1.0, 2.0]))
