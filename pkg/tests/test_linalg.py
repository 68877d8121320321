import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerpos.errors import DimMismatch, NonHermitianInput, UnsupportedMatrix
from powerpos.linalg import (
    DEFAULT_TOL,
    as_matrix,
    det,
    direct_sum,
    eig_general_2x2,
    eigh,
    matrix_function,
    minor_delete,
    pad_zeros,
    psd_check,
    psd_threshold,
    schur_product,
)
from powerpos.rng import make_rng, random_gram


@given(st.integers(0, 10_000), st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_eigh_matches_numpy(seed, n):
    rng = make_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = X + X.conj().T
    d = eigh(H)
    assert np.allclose(d.values, np.linalg.eigvalsh(H), atol=1e-10)
    assert np.allclose(d.reconstruct(), H, atol=1e-10)
    assert np.allclose(d.vectors.conj().T @ d.vectors, np.eye(n), atol=1e-10)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        eigh(np.array([[1, 2], [0, 1]]))


def test_as_matrix_validation():
    with pytest.raises(DimMismatch):
        as_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_matrix(np.array([[np.nan]]))


def test_psd_threshold_scales_with_norm():
    A = 1e6 * np.eye(3)
    assert psd_threshold(A) == pytest.approx(DEFAULT_TOL.psd * np.linalg.norm(A))
    assert psd_threshold(1e-3 * np.eye(3)) == DEFAULT_TOL.psd


def test_psd_check_reports_direction():
    A = np.diag([1.0, -0.5, 2.0])
    rep = psd_check(A)
    assert not rep.is_psd
    assert rep.min_eigenvalue == pytest.approx(-0.5)
    assert abs(abs(rep.direction[1]) - 1) < 1e-12
    assert psd_check(np.diag([1.0, -1e-12])).is_psd


def test_matrix_function_hermitian_and_diagonal():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    S = matrix_function(A, np.sqrt)
    assert np.allclose(S @ S, A)
    D = matrix_function(np.diag([4.0, 9.0]), np.sqrt)
    assert np.allclose(D, np.diag([2.0, 3.0]))


def test_matrix_function_general_2x2():
    A = np.array([[1.0, 2.0], [0.5, 3.0]])
    g = eig_general_2x2(A)
    assert np.allclose(np.sort_complex(g.values), np.sort_complex(np.linalg.eigvals(A)))
    S = matrix_function(A, lambda z: z**2)
    assert np.allclose(S, A @ A)


def test_matrix_function_direct_sum_of_general_blocks():
    B = np.array([[1.0, 2.0], [0.5, 3.0]])
    A = direct_sum([B, np.diag([2.0])])
    S = matrix_function(A, lambda z: z**2)
    assert np.allclose(S, A @ A)


def test_matrix_function_rejects_large_non_normal():
    A = np.triu(np.ones((3, 3)))
    A[2, 0] = 0.3
    with pytest.raises(UnsupportedMatrix):
        matrix_function(A, np.sqrt)


def test_block_helpers():
    A = np.arange(4.0).reshape(2, 2)
    assert np.array_equal(schur_product(A, A), A * A)
    P = pad_zeros(A, 4)
    assert P.shape == (4, 4) and np.array_equal(P[:2, :2], A) and not P[2:].any()
    M = np.diag([1.0, 2.0, 3.0])
    assert det(minor_delete(M, 1)).real == pytest.approx(3.0)


def test_gram_samples_are_psd():
    rng = make_rng(3)
    for _ in range(20):
        assert psd_check(random_gram(rng, 5)).is_psd
