"""Block matrices whose blocks commute, and the block-trace map.

Commuting Hermitian blocks ``H_st`` are diagonalized by one unitary ``U``.
Reading off the ``k``-th diagonal entry of every ``U^* H_st U`` gives
``n x n`` slices ``A_1, ..., A_m``, and a fixed index shuffle ``P`` turns
``U^{*(+)n} H U^{(+)n}`` into ``A_1 (+) ... (+) A_m``.  Blockwise powers then
act as entrywise powers on the slices, which reduces positivity questions
to the entrywise case.
"""

from dataclasses import dataclass, field

import numpy as np

from .blockwise import BlockMatrix, assemble, split
from .characters import Family, evaluate, is_integral
from .entrywise import (
    INT_TOL,
    apply_entrywise,
    classify_entrywise,
    etop3_witness,
    fitzhorn_witness,
    i_plus_ones_witness,
    real_rank2_witness,
)
from .errors import DegeneracyUnresolved, DimMismatch, NonCommutingBlocks, PreconditionError
from .linalg import DEFAULT_TOL, as_matrix, direct_sum, eigh, frobenius, hermitian_check
from .rng import make_rng
from .verdict import Verdict, make_witness

COMM_TOL = 1e-10


@dataclass(frozen=True)
class CommutingBlockFamily:
    """An ``n x n`` grid of pairwise commuting Hermitian ``m x m`` blocks."""

    matrix: BlockMatrix
    commutator_norm: float
    info: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.matrix.m

    @property
    def n(self):
        return self.matrix.n

    @property
    def carrier(self):
        return self.matrix.carrier


def _block_list(H):
    return [H.block(s, t) for s in range(H.n) for t in range(H.n)]


def commutator_norm(H):
    """Largest ``||H_st H_uv - H_uv H_st||_F`` over all pairs of blocks."""
    bl = _block_list(H)
    worst = 0.0
    for i, X in enumerate(bl):
        for Y in bl[i + 1 :]:
            worst = max(worst, frobenius(X @ Y - Y @ X))
    return worst


def commuting_family(H, m=None, tol=DEFAULT_TOL, **info):
    """Validate ``H`` (a :class:`BlockMatrix` or a matrix with block size ``m``).

    Raises
    ------
    NonCommutingBlocks
        If a block is not Hermitian or two blocks fail to commute within
        ``1e-10`` times the largest block norm (squared).
    """
    if not isinstance(H, BlockMatrix):
        H = split(H, m)
    bl = _block_list(H)
    scale = max(1.0, max(frobenius(X) for X in bl))
    if not all(hermitian_check(X, tol) for X in bl):
        raise NonCommutingBlocks("every block must be Hermitian")
    cn = commutator_norm(H)
    if cn > COMM_TOL * scale * scale:
        raise NonCommutingBlocks(f"blocks do not commute (commutator norm {cn:.3g})")
    return CommutingBlockFamily(H, cn, dict(info))


# -- simultaneous diagonalization -------------------------------------------


def _cluster(values, gap):
    """Split sorted eigenvalues into runs separated by more than ``gap``."""
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > gap:
            groups.append(list(range(start, i)))
            start = i
    return groups


def _refine(blocks, Q, rng, tol, depth=0, retries=10):
    """Orthonormal basis of ``span Q`` diagonalizing all (compressed) blocks."""
    k = Q.shape[1]
    if k == 1:
        return Q
    comp = [Q.conj().T @ X @ Q for X in blocks]
    scale = max(1.0, max(frobenius(C) for C in comp))
    # already scalar on this subspace
    if all(frobenius(C - np.trace(C) / k * np.eye(k)) <= 1e-10 * scale for C in comp):
        return Q
    for _ in range(retries):
        coef = rng.standard_normal(len(comp))
        S = sum(w * C for w, C in zip(coef, comp))
        S = 0.5 * (S + S.conj().T)
        ed = eigh(S, tol)
        groups = _cluster(ed.values, 1e-8 * max(1.0, frobenius(S)))
        if len(groups) > 1:
            parts = [_refine(blocks, Q @ ed.vectors[:, g], rng, tol, depth + 1, retries) for g in groups]
            return np.hstack(parts)
    raise DegeneracyUnresolved(f"no random combination split a {k}-dimensional eigenspace in {retries} tries")


@dataclass(frozen=True)
class SliceDecomposition:
    """``H = (T P^{-1})(A_1 (+) ... (+) A_m)(T P^{-1})^*`` with ``T = U^{(+)n}``.

    ``permutation[i]`` is the position in the direct sum of carrier index
    ``i = s*m + k`` (0-based), namely ``k*n + s``.
    """

    U: np.ndarray
    slices: list
    permutation: np.ndarray

    @property
    def m(self):
        return self.U.shape[0]

    @property
    def n(self):
        return self.slices[0].shape[0]

    def transport(self):
        """The unitary ``W`` with ``W^* H W = A_1 (+) ... (+) A_m``."""
        T = np.kron(np.eye(self.n), self.U)
        Pm = permutation_matrix(self.permutation)
        return T @ Pm.T

    def reconstruct(self, slices=None):
        W = self.transport()
        D = direct_sum(self.slices if slices is None else slices)
        return W @ D @ W.conj().T


def simultaneous_diagonalize(fam, seed=0, tol=DEFAULT_TOL):
    """Common eigenbasis ``U`` of all blocks and the slices it induces.

    A seeded real combination of the blocks is diagonalized; repeated
    eigenvalues are split by recursing with fresh combinations inside
    each eigenspace.
    """
    H = fam.matrix
    rng = make_rng(seed)
    bl = _block_list(H)
    U = _refine(bl, np.eye(H.m, dtype=np.complex128), rng, tol)
    m, n = H.m, H.n
    slices = [np.empty((n, n), dtype=np.complex128) for _ in range(m)]
    for s in range(n):
        for t in range(n):
            D = U.conj().T @ H.block(s, t) @ U
            for k in range(m):
                slices[k][s, t] = D[k, k]
    return SliceDecomposition(U, slices, shuffle_permutation(m, n))


def shuffle_permutation(m, n):
    """0-based index map ``s*m + k -> k*n + s`` (block ``s``, diagonal slot ``k``)."""
    return np.array([k * n + s for s in range(n) for k in range(m)], dtype=int)


def permutation_matrix(perm):
    """``P`` with ``(P x)[perm[i]] = x[i]``."""
    N = len(perm)
    P = np.zeros((N, N))
    P[perm, np.arange(N)] = 1.0
    return P


def lift_counterexample(A, m, source=None):
    """``A (x) I_m``: blocks ``a_st I_m``, the shuffle of ``A^{(+)m}``."""
    A = as_matrix(A)
    H = BlockMatrix(m, A.shape[0], np.kron(A, np.eye(m)))
    info = {"construction": "lift"}
    if source is not None:
        info["source"] = source
    return CommutingBlockFamily(H, 0.0, info)


def apply_commuting(c, fam, seed=0, tol=DEFAULT_TOL):
    """``c^{[m]}[H]`` computed slice by slice and transported back."""
    dec = simultaneous_diagonalize(fam, seed, tol)
    images = [apply_entrywise(c, A) for A in dec.slices]
    return BlockMatrix(fam.m, fam.n, dec.reconstruct(images))


# -- classification -----------------------------------------------------------


def _lifted_witness(w, m, source):
    """Turn an entrywise witness ``(A, v)`` into ``(A (x) I_m, v (x) e_1)``."""
    fam = lift_counterexample(w.input, m, source)
    e1 = np.zeros(m)
    e1[0] = 1.0
    v = np.kron(w.direction, e1)
    return make_witness(fam.carrier, w.map, m=m, direction=v, **{**w.info, **fam.info})


def _preserving_set(c, n):
    """Membership in the preserving set for a real family at grid size ``n``."""
    a = c.alpha
    if a >= n - 2 and a > 0:
        return True
    if not is_integral(a, INT_TOL) or a < 0.5:
        return False
    k = int(round(a))
    if c.family is Family.F_PLAIN:
        return True
    if c.family is Family.PHI_EVEN:
        return k % 2 == 0
    return k % 2 == 1


def classify_commuting(m, n, c, seed=0, tol=DEFAULT_TOL):
    """Positivity preservation by ``c^{[m]}`` on PSD matrices with commuting blocks.

    Families ``f``, ``phi`` and ``psi`` only; the verdict does not depend on
    ``m``.  Failures are entrywise witnesses lifted to ``A (x) I_m``.
    """
    if c.family is Family.PSI_COMPLEX:
        raise PreconditionError("commuting classifier takes f, phi or psi")
    if m < 2 or n < 2:
        raise PreconditionError("commuting classification needs m, n >= 2")
    a = c.alpha
    base = {"regime": "commuting", "m": m, "n": n, "family": c.family.value, "alpha": a}
    if a == 0:
        if n == 2:
            return Verdict.preserves(name="ZeroPowerOrder2", **base)
        w = etop3_witness(n, c, tol)
        return Verdict.fails(_lifted_witness(w, m, "etop3"), name="Etop3Lift", **base)
    if a < 0:
        w = i_plus_ones_witness(n, c, tol)
        return Verdict.fails(_lifted_witness(w, m, "i_plus_ones"), name="IPlusOnesLift", **base)
    if _preserving_set(c, n):
        name = "IntegerPower" if is_integral(a, INT_TOL) else "ThresholdB"
        return Verdict.preserves(name=name, **base)
    if not is_integral(a, INT_TOL):
        w = fitzhorn_witness(n, a, c, tol)
        return Verdict.fails(_lifted_witness(w, m, "fitzhorn"), name="FitzHornLift", **base)
    # integral power of the wrong parity below n - 2
    w = real_rank2_witness(n, c, seed=seed, tol=tol)
    return Verdict.fails(_lifted_witness(w, m, "real_rank2"), name="ParityLift", **base)


# -- block traces -------------------------------------------------------------


def trace_map(H):
    """``(tr H_st)_{s,t}``."""
    if not isinstance(H, BlockMatrix):
        raise TypeError("trace_map expects a BlockMatrix")
    return np.array([[np.trace(H.block(s, t)) for t in range(H.n)] for s in range(H.n)], dtype=np.complex128)


def gram_trace(mats):
    """Gram matrix ``(tr(H_s^* H_t))`` in the trace inner product."""
    mats = [np.asarray(X, dtype=np.complex128) for X in mats]
    if not mats:
        raise DimMismatch("need at least one matrix")
    shape = mats[0].shape
    if any(X.shape != shape for X in mats):
        raise DimMismatch("all matrices must share one shape")
    F = np.stack([X.ravel() for X in mats], axis=1)
    G = F.conj().T @ F
    return 0.5 * (G + G.conj().T)


def embed_rank1(A, m):
    """Blocks ``a_st E_11``: PSD iff ``A`` is, with ``trace_map`` equal to ``A``."""
    A = as_matrix(A)
    n = A.shape[0]
    blocks = []
    for s in range(n):
        row = []
        for t in range(n):
            B = np.zeros((m, m), dtype=np.complex128)
            B[0, 0] = A[s, t]
            row.append(B)
        blocks.append(row)
    return assemble(blocks)


def classify_trace_map(m, n, c, seed=0, tol=DEFAULT_TOL):
    """Does ``H -> c[(tr H_st)]`` preserve positivity on ``mn x mn`` PSD matrices?

    The block traces of PSD matrices are exactly the PSD ``n x n`` matrices,
    so this is the entrywise question; the certificate records that.
    """
    if c.alpha < 0:
        raise PreconditionError("trace-map classification needs alpha >= 0")
    if c.family is Family.PSI_COMPLEX and not c.beta_integral:
        raise PreconditionError("trace-map classification needs an integral beta")
    v = classify_entrywise(n, c, seed=seed, tol=tol)
    cert = {**v.certificate, "regime": "trace", "m": m, "delegated_to": "entrywise"}
    if v.witness is not None:
        cert["rank1_embedding"] = True
    return Verdict(v.status, cert, v.witness, v.bounds)


def trace_witness_lift(w, m):
    """Block witness from an entrywise one: ``embed_rank1`` of its input."""
    return embed_rank1(w.input, m)


def apply_trace_map(c, H):
    return np.asarray(evaluate(c, trace_map(H)), dtype=np.complex128)


__all__ = [
    "CommutingBlockFamily",
    "SliceDecomposition",
    "apply_commuting",
    "apply_trace_map",
    "classify_commuting",
    "classify_trace_map",
    "commuting_family",
    "commutator_norm",
    "embed_rank1",
    "gram_trace",
    "lift_counterexample",
    "permutation_matrix",
    "shuffle_permutation",
    "simultaneous_diagonalize",
    "trace_map",
    "trace_witness_lift",
]
