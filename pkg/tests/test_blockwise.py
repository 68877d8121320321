import math

import numpy as np
import pytest

from powerpos.blockwise import (
    BlockMatrix,
    ac_matrix,
    apply_blockwise,
    apply_blockwise_matrix,
    assemble,
    classify_blockwise,
    gM_eval,
    gM_matrix_path,
    loewner_det_power,
    loewner_matrix,
    m44_matrix,
    mabc_matrix,
    monotone_gadget,
    monotone_violation,
    pad_blockwise,
    split,
)
from powerpos.characters import Character
from powerpos.errors import DimMismatch, DomainViolation, NotDominating, PreconditionError
from powerpos.linalg import psd_check
from powerpos.rng import make_rng, random_gram
from powerpos.verdict import Status


def numpy_block_image(c, A, m):
    # oracle for Hermitian blocks: numpy eigh, independent of the Jacobi solver
    n = A.shape[0] // m
    out = np.zeros_like(A, dtype=np.complex128)
    for s in range(n):
        for t in range(n):
            B = A[s * m : (s + 1) * m, t * m : (t + 1) * m]
            w, V = np.linalg.eigh(B)
            out[s * m : (s + 1) * m, t * m : (t + 1) * m] = (V * c(w)) @ V.conj().T
    return out


def test_split_and_assemble():
    A = np.arange(16.0).reshape(4, 4)
    H = split(A, 2)
    assert H.n == 2 and np.array_equal(H.block(1, 0), A[2:, :2])
    assert np.array_equal(assemble(H.blocks()).carrier, H.carrier)
    with pytest.raises(DimMismatch):
        split(np.eye(5), 2)
    with pytest.raises(DimMismatch):
        BlockMatrix(2, 3, np.eye(4))
    with pytest.raises(TypeError):
        apply_blockwise(Character.f(1), np.eye(4))


def test_m1_is_entrywise():
    A = random_gram(make_rng(0), 4)
    c = Character.Psi(2, 1)
    assert np.allclose(apply_blockwise_matrix(c, A, 1), c(A))


def test_image_matches_numpy_oracle():
    rng = make_rng(1)
    c = Character.phi(1.5)
    for _ in range(10):
        P = np.real(random_gram(rng, 3, real=True))
        Q = np.real(random_gram(rng, 2, real=True))
        A = np.kron(P, Q)
        assert np.allclose(apply_blockwise_matrix(c, A, 2), numpy_block_image(c, A, 2), atol=1e-10)


def test_m44_is_psd_and_gM_paths():
    M = m44_matrix()
    assert np.linalg.eigvalsh(M.carrier)[0] >= -1e-12
    for a in (0.1, 0.5, 0.9, 2.0, -0.5):
        assert gM_eval(a) == pytest.approx(gM_matrix_path(a), abs=1e-12)
    assert gM_eval(0.5) < 0


def test_ac_family_spectrum():
    A = ac_matrix(2.0).carrier
    assert np.allclose(np.linalg.eigvalsh(A), [2 - math.sqrt(2), 2, 2, 2 + math.sqrt(2)])


def test_mabc_psd_region():
    assert psd_check(mabc_matrix(0.5, 0.5, 0).carrier).is_psd


def test_loewner_matrix():
    L = loewner_matrix(Character.f(2), [1.0, 2.0])
    assert np.allclose(L.entries, [[2, 3], [3, 4]])
    assert np.linalg.det(L.entries) == pytest.approx(loewner_det_power(2, 1, 2))
    with pytest.raises(DomainViolation):
        loewner_matrix(Character.phi(2), [1.0, 2.0])
    with pytest.raises(PreconditionError):
        loewner_det_power(2, 1, 1)


def test_monotone_gadget():
    B = np.diag([1.0, 2.0])
    A = B + 0.1 * np.ones((2, 2))
    G = monotone_gadget(A, B)
    assert psd_check(G.carrier).is_psd
    img = apply_blockwise(Character.f(2), G).carrier
    assert (psd_check(img).min_eigenvalue < 0) == (monotone_violation(2, A, B) < 0)
    with pytest.raises(NotDominating):
        monotone_gadget(B, A)


def test_pad_blockwise_negative_alpha_keeps_blocks_invertible():
    H = split(np.kron(np.array([[2.0, 1.0], [1.0, 2.0]]), np.eye(2)), 2)
    P = pad_blockwise(H, 3, 3, alpha=-1)
    assert psd_check(P.carrier).is_psd
    for s in range(3):
        for t in range(3):
            assert abs(np.linalg.det(P.block(s, t))) > 0


@pytest.mark.parametrize(
    "c,status,name",
    [
        (Character.f(1), Status.PRESERVES, "Identity"),
        (Character.psi(1), Status.PRESERVES, "Identity"),
        (Character.Psi(1, 1), Status.PRESERVES, "Identity"),
        (Character.Psi(1, -1), Status.PRESERVES, "Identity"),
        (Character.Psi(1, 2), Status.FAILS, "Mabc"),
        (Character.Psi(1, -3), Status.FAILS, "Mabc"),
        (Character.phi(1), Status.FAILS, "Phi1Matrix"),
        (Character.Psi(1, 0), Status.FAILS, "Phi1Matrix"),
        (Character.f(0), Status.PRESERVES, "ZeroPower"),
        (Character.phi(0), Status.FAILS, "Ac"),
        (Character.f(0.5), Status.FAILS, "M44"),
        (Character.f(2), Status.FAILS, "LoewnerGadget"),
        (Character.psi(3), Status.FAILS, "LoewnerGadget"),
        (Character.f(-1), Status.FAILS, "LoewnerGadget"),
    ],
)
@pytest.mark.parametrize("m,n", [(2, 2), (3, 3)])
def test_classify_blockwise(c, status, name, m, n):
    v = classify_blockwise(m, n, c)
    assert v.status is status and v.name == name
    if status is Status.FAILS:
        w = v.witness
        assert w.input.shape == (m * n, m * n)
        assert w.verifies()
        assert np.linalg.eigvalsh(w.input)[0] >= -1e-9 * max(1, np.linalg.norm(w.input))


def test_classify_blockwise_preconditions():
    with pytest.raises(PreconditionError):
        classify_blockwise(1, 3, Character.f(2))
    with pytest.raises(PreconditionError):
        classify_blockwise(2, 2, Character.Psi(1, 0.5))
    assert classify_blockwise(2, 2, Character.f(0)).certificate["positive_definite_blocks_only"]
