import numpy as np
import pytest

from powerpos.blockwise import apply_blockwise, split
from powerpos.characters import Character
from powerpos.commuting import (
    apply_commuting,
    classify_commuting,
    classify_trace_map,
    commuting_family,
    embed_rank1,
    gram_trace,
    lift_counterexample,
    permutation_matrix,
    shuffle_permutation,
    simultaneous_diagonalize,
    trace_map,
)
from powerpos.entrywise import classify_entrywise
from powerpos.errors import NonCommutingBlocks, PreconditionError
from powerpos.linalg import psd_check
from powerpos.rng import make_rng, random_gram
from powerpos.verdict import Status


def commuting_sample(rng, m, n, degenerate=False):
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    H = np.zeros((m * n, m * n))
    for k in range(m):
        P = np.real(random_gram(rng, n, real=True, nonnegative=True))
        if degenerate and k == 1:
            P = H_prev
        H_prev = P
        H += np.kron(P, np.outer(Q[:, k], Q[:, k]))
    return H


def test_shuffle_permutation():
    assert list(shuffle_permutation(2, 2)) == [0, 2, 1, 3]
    perm = shuffle_permutation(3, 4)
    P = permutation_matrix(perm)
    x = np.arange(12.0)
    assert np.array_equal((P @ x)[perm], x)


@pytest.mark.parametrize("degenerate", [False, True])
def test_slices_reconstruct(degenerate):
    rng = make_rng(5)
    H = commuting_sample(rng, 3, 4, degenerate)
    fam = commuting_family(H, 3)
    dec = simultaneous_diagonalize(fam)
    assert np.allclose(dec.reconstruct(), H, atol=1e-10)
    W = dec.transport()
    assert np.allclose(W.conj().T @ W, np.eye(12), atol=1e-12)


def test_apply_commuting_matches_blockwise():
    rng = make_rng(6)
    c = Character.f(2.5)
    for _ in range(5):
        H = commuting_sample(rng, 2, 3)
        fam = commuting_family(H, 2)
        assert np.allclose(apply_commuting(c, fam).carrier, apply_blockwise(c, split(H, 2)).carrier, atol=1e-10)


def test_rejects_non_commuting():
    H = np.kron(np.ones((2, 2)), np.eye(2))
    H[0:2, 2:4] = [[0, 1], [1, 0]]
    H[2:4, 0:2] = [[0, 1], [1, 0]]
    H[2:4, 2:4] = np.diag([1.0, 2.0])
    with pytest.raises(NonCommutingBlocks):
        commuting_family(H, 2)
    # non-Hermitian diagonal blocks
    with pytest.raises(NonCommutingBlocks):
        commuting_family(np.kron(np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]])), 2)


def test_lift_is_psd_and_commuting():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    fam = lift_counterexample(A, 3, source="x")
    assert fam.info == {"construction": "lift", "source": "x"}
    assert psd_check(fam.carrier).is_psd and commuting_family(fam.matrix).commutator_norm == 0


@pytest.mark.parametrize(
    "c,n,status,name",
    [
        (Character.f(0), 2, Status.PRESERVES, "ZeroPowerOrder2"),
        (Character.f(0), 4, Status.FAILS, "Etop3Lift"),
        (Character.phi(-1), 3, Status.FAILS, "IPlusOnesLift"),
        (Character.f(2), 5, Status.PRESERVES, "IntegerPower"),
        (Character.phi(2), 5, Status.PRESERVES, "IntegerPower"),
        (Character.psi(3.5), 5, Status.PRESERVES, "ThresholdB"),
        (Character.f(1.5), 5, Status.FAILS, "FitzHornLift"),
        (Character.phi(1), 5, Status.FAILS, "ParityLift"),
        (Character.psi(2), 5, Status.FAILS, "ParityLift"),
    ],
)
def test_classify_commuting(c, n, status, name):
    v = classify_commuting(2, n, c)
    assert v.status is status and v.name == name
    if status is Status.FAILS:
        w = v.witness
        assert w.verifies()
        commuting_family(w.input, 2)


def test_classify_commuting_rejects_complex_family():
    with pytest.raises(PreconditionError):
        classify_commuting(2, 3, Character.Psi(2, 1))


def test_trace_map_of_psd_is_psd():
    rng = make_rng(7)
    for _ in range(20):
        H = split(random_gram(rng, 9), 3)
        assert psd_check(trace_map(H)).is_psd


def test_gram_trace_and_embedding():
    rng = make_rng(8)
    mats = [rng.standard_normal((2, 2)) for _ in range(3)]
    G = gram_trace(mats)
    assert np.allclose(G[0, 1], np.trace(mats[0].T @ mats[1]))
    A = random_gram(rng, 3)
    E = embed_rank1(A, 2)
    assert np.allclose(trace_map(E), A) and psd_check(E.carrier).is_psd


def test_trace_map_delegates():
    c = Character.Psi(1.5, 1)
    v = classify_trace_map(2, 5, c)
    assert v.status is classify_entrywise(5, c).status
    assert v.certificate["delegated_to"] == "entrywise"
    with pytest.raises(PreconditionError):
        classify_trace_map(2, 3, Character.f(-1))
