import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtstokes.errors import AngleUndefinedError, ConeViolationError
from gtstokes.gt import (GTCoordinates, SpectrumTable, TorusElement, angle_distance, diagonalizer_P,
                         gt_a_coeffs, gt_coordinates, gt_map, in_open_cone, ladder_L,
                         moduli_squared, normalizer_N, rebuild, require_cone, thimm_act,
                         thimm_act_full)
from gtstokes.jsonio import dumps
from gtstokes.linalg import unitarity_residual
from gtstokes.sampling import random_torus

from conftest import A3, herm0, seeds

sizes = st.integers(2, 6)


@given(sizes, seeds)
def test_interlacing(n, seed):
    table = gt_map(herm0(n, seed))
    assert table.interlaces(1e-10)
    assert table.level(0).size == 0
    assert all(table.level(k).size == k for k in range(1, n + 1))


def test_gt_map_2x2_closed_form():
    a, b, c = 0.7, 0.3 - 0.4j, -0.2
    table = gt_map(np.array([[a, b], [np.conj(b), c]]))
    disc = np.hypot(a - c, 2 * abs(b))
    np.testing.assert_allclose(table.level(1), [a])
    np.testing.assert_allclose(table.level(2), [(a + c + disc) / 2, (a + c - disc) / 2])


def test_cone_violation_names_level():
    A = np.diag([1.0, 2.0, 3.0]).astype(complex)
    A[0, 1] = A[1, 0] = 0.5
    with pytest.raises(ConeViolationError) as exc:
        require_cone(A)
    assert exc.value.level == 3
    assert not in_open_cone(gt_map(A), 1e-8)


def test_spectrum_table_json_shape():
    t = gt_map(A3)
    assert SpectrumTable.from_rows(t.tolist()).tolist() == t.tolist()


@given(sizes, seeds)
def test_diagonalizer(n, seed):
    A = herm0(n, seed)
    table = gt_map(A)
    for k in range(1, n + 1):
        P = diagonalizer_P(A, k)
        assert unitarity_residual(P) < 1e-12
        D = (P.conj().T @ A @ P)[:k, :k]
        np.testing.assert_allclose(D, np.diag(table.level(k)), atol=1e-11)
        row = P[k - 1, :k]
        assert np.all(row.real > 0) and np.allclose(row.imag, 0, atol=1e-14)
        Pm = diagonalizer_P(A, k, method="minor")
        assert np.linalg.norm(P - Pm) <= 1e-8 * np.linalg.norm(P)


@given(sizes, seeds)
def test_a_coeffs_identities(n, seed):
    A = herm0(n, seed)
    table = gt_map(A)
    for k in range(1, n):
        a = gt_a_coeffs(A, k)
        np.testing.assert_allclose(gt_a_coeffs(A, k, method="minor"), a, atol=1e-10)
        np.testing.assert_allclose(np.abs(a) ** 2, moduli_squared(table, k), atol=1e-10)
        for j in range(k + 1):
            _, disc = normalizer_N(table, k + 1, j, with_check=True)
            assert disc < 1e-10


@given(sizes, seeds)
def test_ladder_recursion(n, seed):
    A = herm0(n, seed)
    for k1 in range(2, n + 1):
        np.testing.assert_allclose(diagonalizer_P(A, k1 - 1) @ ladder_L(A, k1),
                                   diagonalizer_P(A, k1), atol=1e-11)


def test_ladder_2x2_example():
    # P_1 = 1, so L^(2) = P_2 and its first row is b/(λ_j - a)/N_j
    a, b, c = 0.5, 0.25 + 0.5j, -0.3
    A = np.array([[a, b], [np.conj(b), c]])
    lam = gt_map(A).level(2)
    N = np.sqrt(1 + abs(b) ** 2 / (lam - a) ** 2)
    np.testing.assert_allclose(ladder_L(A, 2)[0], b / (lam - a) / N, atol=1e-14)
    np.testing.assert_allclose(ladder_L(A, 2)[1], 1 / N, atol=1e-14)


@given(sizes, seeds)
def test_thimm_action(n, seed):
    A = herm0(n, seed)
    rng = np.random.default_rng(seed)
    t = random_torus(n, rng)
    B = thimm_act_full(t, A)
    ta, tb = gt_map(A), gt_map(B)
    for k in range(1, n + 1):
        np.testing.assert_allclose(tb.level(k), ta.level(k), atol=1e-10)
    c0, c1 = gt_coordinates(A), gt_coordinates(B)
    for k in range(n - 1):
        assert angle_distance(c1.angles[k] - c0.angles[k], t.angles[k]).max() < 1e-9
        np.testing.assert_allclose(c1.moduli[k], c0.moduli[k], atol=1e-10)


def test_thimm_single_level_only_moves_that_angle():
    A = herm0(4, 3)
    theta = np.array([0.3, -1.1])
    B = thimm_act(theta, 2, A)
    c0, c1 = gt_coordinates(A), gt_coordinates(B)
    assert angle_distance(c1.angles[1] - c0.angles[1], theta).max() < 1e-10
    for k in (0, 2):
        assert angle_distance(c1.angles[k], c0.angles[k]).max() < 1e-10


def test_torus_element_arithmetic():
    t = TorusElement((np.array([7.0]), np.array([-1.0, 1.0])))
    assert 0 <= t.level(1)[0] < 2 * np.pi
    z = t - t
    assert all(angle_distance(a, 0).max() < 1e-14 for a in z.angles)
    assert TorusElement.zeros(3).n == 3


@given(sizes, seeds)
def test_rebuild_roundtrip(n, seed):
    A = herm0(n, seed)
    assert np.linalg.norm(rebuild(gt_coordinates(A)) - A) <= 1e-7


def test_coordinates_json_roundtrip():
    c = gt_coordinates(A3)
    back = GTCoordinates.from_json(json.loads(dumps(c.to_json())))
    np.testing.assert_allclose(rebuild(back), A3, atol=1e-12)


def test_angle_undefined():
    with pytest.raises(AngleUndefinedError) as exc:
        gt_coordinates(A3, mod_tol=10.0)
    assert exc.value.level == 1
