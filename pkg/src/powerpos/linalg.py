"""Dense complex matrix substrate.

Hermitian eigendecomposition (cyclic Jacobi), spectral matrix functions,
tolerance-based PSD checks and block assembly helpers.  Matrices are plain
``numpy`` arrays of dtype ``complex128``; nothing here mutates its inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import Defective2x2, DimMismatch, NonHermitianInput, UnsupportedMatrix


@dataclass(frozen=True)
class Tolerances:
    sym: float = 1e-10
    eig: float = 1e-10
    psd: float = 1e-9
    defect: float = 1e-12
    jacobi: float = 1e-14
    max_sweeps: int = 100

    def replace(self, **kw):
        fields = {**self.__dict__, **kw}
        return Tolerances(**fields)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class EigenDecomposition:
    """Hermitian eigenpairs, ``values`` ascending, ``vectors`` unitary."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        V = self.vectors
        return (V * self.values) @ V.conj().T


@dataclass(frozen=True)
class GeneralEigen2x2:
    values: np.ndarray
    vectors: np.ndarray
    condition: float


def as_matrix(A):
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def frobenius(A):
    return float(np.linalg.norm(A))


def hermitian_check(A, tol=DEFAULT_TOL):
    A = as_matrix(A)
    dev = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    return bool(dev <= tol.sym * max(1.0, frobenius(A)))


def _jacobi_pair(app, aqq, apq):
    """Unitary 2x2 rotation annihilating the (p, q) entry of a Hermitian pair."""
    mag = abs(apq)
    phase = apq / mag
    tau = (aqq - app) / (2.0 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # conj(phase) on the q side turns the pair real, then a real rotation
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])


def eigh(A, tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Pairs are visited in row-major order (p < q).  Iteration stops once the
    off-diagonal Frobenius mass drops below ``tol.jacobi * ||A||_F``.

    Raises
    ------
    NonHermitianInput
        If ``A`` fails :func:`hermitian_check`.
    """
    A = as_matrix(A)
    if not hermitian_check(A, tol):
        raise NonHermitianInput("eigh requires a Hermitian matrix")
    n = A.shape[0]
    W = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=np.complex128)
    scale = frobenius(A)
    target = tol.jacobi * scale

    def off(M):
        return frobenius(M - np.diag(np.diag(M)))

    for _ in range(tol.max_sweeps):
        if scale == 0.0 or off(W) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = W[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * scale:
                    continue
                J = _jacobi_pair(W[p, p].real, W[q, q].real, apq)
                idx = [p, q]
                W[:, idx] = W[:, idx] @ J
                W[idx, :] = J.conj().T @ W[idx, :]
                W[p, q] = W[q, p] = 0.0
                W[p, p] = W[p, p].real
                W[q, q] = W[q, q].real
                V[:, idx] = V[:, idx] @ J
    d = np.real(np.diag(W))
    order = np.argsort(d, kind="stable")
    return EigenDecomposition(values=d[order], vectors=V[:, order])


def eig_general_2x2(A, tol=DEFAULT_TOL):
    """Closed-form eigenpairs of a diagonalizable 2x2 matrix.

    Eigenvectors are unit columns of ``vectors``.  A repeated eigenvalue is
    accepted only for normal input (which is then a scalar multiple of I).
    """
    A = as_matrix(A)
    if A.shape != (2, 2):
        raise DimMismatch("eig_general_2x2 needs a 2x2 matrix")
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    half = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c + 0j)
    l1, l2 = half + disc, half - disc
    scale = max(1.0, frobenius(A))
    if abs(l1 - l2) <= tol.defect * scale:
        normal = np.max(np.abs(A @ A.conj().T - A.conj().T @ A)) <= tol.sym * scale**2
        if not normal:
            raise Defective2x2("repeated eigenvalue on a non-normal 2x2 matrix")
        return GeneralEigen2x2(
            values=np.array([l1, l1]), vectors=np.eye(2, dtype=np.complex128), condition=1.0
        )
    cols = []
    for lam in (l1, l2):
        u = np.array([b, lam - a])
        w = np.array([lam - d, c])
        v = u if np.linalg.norm(u) >= np.linalg.norm(w) else w
        if np.linalg.norm(v) == 0.0:
            # diagonal input: pick the matching basis vector
            v = np.array([1.0, 0.0]) if abs(lam - a) <= abs(lam - d) else np.array([0.0, 1.0])
        cols.append(v / np.linalg.norm(v))
    P = np.column_stack(cols).astype(np.complex128)
    return GeneralEigen2x2(values=np.array([l1, l2]), vectors=P, condition=float(np.linalg.cond(P)))


def _is_diagonal(A):
    return not np.any(A - np.diag(np.diag(A)))


def matrix_function(A, f, tol=DEFAULT_TOL):
    """Spectral calculus ``P f(D) P^{-1}``.

    ``f`` maps an array of (possibly complex) eigenvalues to values; the
    power maps in :mod:`powerpos.characters` qualify.  Eigenvalues within
    ``tol.eig * ||A||_F`` of zero are snapped to exactly zero first, so the
    conventions at the origin (``f(0) = 0``) apply to numerically singular
    blocks.  Diagonal input is handled entry by entry and is exact.
    """
    A = as_matrix(A)
    scale = frobenius(A)
    snap = tol.eig * scale

    def fv(vals):
        vals = np.array(vals, dtype=np.complex128)
        vals[np.abs(vals) <= snap] = 0.0
        return np.asarray(f(vals), dtype=np.complex128)

    if _is_diagonal(A):
        return np.diag(fv(np.diag(A)))
    parts = _direct_sum_components(A)
    if len(parts) > 1:
        # the functional calculus respects direct sums; this lets padded
        # non-normal 2x2 blocks through
        out = np.zeros_like(A)
        for idx in parts:
            ix = np.ix_(idx, idx)
            out[ix] = _matrix_function_irreducible(A[ix], fv, tol)
        return out
    return _matrix_function_irreducible(A, fv, tol)


def _direct_sum_components(A):
    """Index sets of the connected components of the sparsity pattern of ``A``."""
    n = A.shape[0]
    linked = (A != 0) | (A.T != 0)
    seen, comps = np.zeros(n, dtype=bool), []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(linked[i] & ~seen):
                seen[j] = True
                stack.append(j)
        comps.append(sorted(comp))
    return comps


def _matrix_function_irreducible(A, fv, tol):
    if _is_diagonal(A):
        return np.diag(fv(np.diag(A)))
    if hermitian_check(A, tol):
        ed = eigh(A, tol)
        V = ed.vectors
        return (V * fv(ed.values)) @ V.conj().T
    if A.shape == (2, 2):
        ge = eig_general_2x2(A, tol)
        P = ge.vectors
        return (P * fv(ge.values)) @ np.linalg.inv(P)
    raise UnsupportedMatrix("non-Hermitian matrix functions are only supported for 2x2 blocks")


@dataclass(frozen=True)
class PSDReport:
    is_psd: bool
    min_eigenvalue: float
    direction: np.ndarray

    def __iter__(self):
        return iter((self.is_psd, self.min_eigenvalue, self.direction))


def psd_threshold(A, tol=DEFAULT_TOL):
    return tol.psd * max(1.0, frobenius(A))


def psd_check(A, tol=DEFAULT_TOL):
    """Return ``(is_psd, lambda_min, eigenvector)`` for a Hermitian matrix."""
    A = as_matrix(A)
    ed = eigh(A, tol)
    lam = float(ed.values[0])
    return PSDReport(lam >= -psd_threshold(A, tol), lam, ed.vectors[:, 0].copy())


def min_eigenvalue(A, tol=DEFAULT_TOL):
    return psd_check(A, tol).min_eigenvalue


def schur_product(A, B):
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise DimMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return A * B


def direct_sum(mats):
    mats = [as_matrix(M) for M in mats]
    n = sum(M.shape[0] for M in mats)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for M in mats:
        k = M.shape[0]
        out[i : i + k, i : i + k] = M
        i += k
    return out


def kronecker(A, B):
    return np.kron(as_matrix(A), as_matrix(B))


def pad_zeros(A, new_dim):
    A = as_matrix(A)
    n = A.shape[0]
    if new_dim < n:
        raise DimMismatch(f"cannot pad a {n}x{n} matrix down to {new_dim}")
    out = np.zeros((new_dim, new_dim), dtype=np.complex128)
    out[:n, :n] = A
    return out


def det(A):
    # LAPACK getrf: LU with partial pivoting
    A = as_matrix(A)
    if A.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(A))


def leading_principal_minor(A, k):
    A = as_matrix(A)
    if not 1 <= k <= A.shape[0]:
        raise DimMismatch(f"minor order {k} out of range for dim {A.shape[0]}")
    return det(A[:k, :k])


def minor_delete(A, rowcol):
    """Principal submatrix with row and column ``rowcol`` (0-based) removed."""
    A = as_matrix(A)
    keep = [i for i in range(A.shape[0]) if i != rowcol]
    return A[np.ix_(keep, keep)]


def ones(n):
    return np.ones((n, n), dtype=np.complex128)
