import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtstokes.am import am_via_rh, gamma_am, gamma_am_2x2, phase_theta, psi_factor
from gtstokes.errors import ConeViolationError
from gtstokes.gt import angle_distance, gt_a_coeffs, gt_map, thimm_act_full
from gtstokes.linalg import unitarity_residual
from gtstokes.sampling import random_torus

from conftest import A2, A3, herm0, seeds

sizes = st.integers(2, 6)


@given(sizes, seeds)
def test_psi_factors_unitary(n, seed):
    A = herm0(n, seed)
    f = gamma_am(A)
    np.testing.assert_array_equal(f.psi_factors[0], np.eye(n))
    for k, P in enumerate(f.psi_factors, start=1):
        assert unitarity_residual(P) < 1e-8
        np.testing.assert_array_equal(P[k:, k:], np.eye(n - k))
        # row k is real and positive
        assert np.all(P[k - 1, :k].real > 0) and np.allclose(P[k - 1, :k].imag, 0)


@given(sizes, seeds)
def test_intertwines_gt_maps(n, seed):
    A = herm0(n, seed)
    G = gamma_am(A).gamma
    assert np.linalg.eigvalsh(G).min() > 0
    table = gt_map(A)
    for k in range(1, n + 1):
        np.testing.assert_allclose(np.log(np.linalg.eigvalsh(G[:k, :k])[::-1]), table.level(k), atol=1e-8)


@given(sizes, seeds)
def test_real_symmetric_preserved(n, seed):
    A = herm0(n, seed, real=True)
    G = gamma_am(A).gamma
    assert np.abs(G.imag).max() < 1e-8
    for k in range(1, n):
        np.testing.assert_array_equal(np.sign(gt_a_coeffs(G, k).real), np.sign(gt_a_coeffs(A, k).real))


@given(sizes, seeds)
def test_thimm_equivariance(n, seed):
    A = herm0(n, seed)
    t = random_torus(n, np.random.default_rng(seed))
    lhs = gamma_am(thimm_act_full(t, A)).gamma
    assert np.linalg.norm(lhs - thimm_act_full(t, gamma_am(A).gamma)) < 1e-8
    # θ depends on the actions only
    for a, b in zip(phase_theta(A).angles, phase_theta(thimm_act_full(t, A)).angles):
        assert angle_distance(a, b).max() < 1e-12


@given(sizes, seeds)
def test_two_path_identity(n, seed):
    A = herm0(n, seed)
    assert np.linalg.norm(gamma_am(A).gamma - am_via_rh(A)) < 1e-8


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_2x2_closed_form(a, c, br, bi):
    b = complex(br, bi)
    if abs(b) < 1e-3:
        return
    M = np.array([[a, b], [np.conj(b), c]])
    np.testing.assert_allclose(gamma_am(M).gamma, gamma_am_2x2(a, b, c), atol=1e-10, rtol=1e-10)


def test_2x2_frozen():
    # (e^{l1} − e^a)(e^a − e^{l2}) evaluated by hand for A2
    a, c, b = 0.3, -0.5, 0.4 - 0.2j
    l1, l2 = np.linalg.eigvalsh(A2)[::-1]
    rad = (np.exp(l1) - np.exp(a)) * (np.exp(a) - np.exp(l2))
    expected = np.array([[np.exp(a), b / abs(b) * np.sqrt(rad)],
                         [np.conj(b) / abs(b) * np.sqrt(rad), np.exp(l1) + np.exp(l2) - np.exp(a)]])
    np.testing.assert_allclose(gamma_am_2x2(a, b, c), expected, atol=1e-15)
    np.testing.assert_allclose(gamma_am(A2).gamma, expected, atol=1e-13)


def test_2x2_boundary():
    with pytest.raises(ValueError):
        gamma_am_2x2(1.0, 0, 2.0)
    with pytest.raises(ConeViolationError):
        gamma_am(np.diag([1.0, 2.0]))


def test_n1():
    np.testing.assert_allclose(gamma_am(np.array([[0.0]])).gamma, [[1.0]])


def test_psi_factor_level_range():
    with pytest.raises(ValueError):
        psi_factor(A3, 4)


def test_real_entries_keep_sign_example():
    # a real matrix with mixed-sign off-diagonal coefficients
    A = np.array([[0.2, -0.7, 0.3], [-0.7, 1.1, 0.4], [0.3, 0.4, -0.6]])
    G = gamma_am(A).gamma
    assert np.isrealobj(G) or np.abs(G.imag).max() < 1e-12
    assert np.sign(G[0, 1].real) == -1
