"""Blockwise spectral powers ``f^{[m]}[H]`` and their classification.

An ``mn x mn`` matrix is viewed as an ``n x n`` grid of ``m x m`` blocks and
the map is applied to every block through its spectral decomposition.  The
counterexamples used by the classifier live here too: the 4x4 matrix ``M``
with ``g_M(alpha) = det f_alpha^{[2]}[M] < 0`` near 0, the family ``A(c)``,
the integer matrix with ``det phi_1^{[2]}[M] = -4/5``, the complex family
``M(a, b, c)``, and the monotonicity gadget built from Loewner matrices.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .characters import Character, Family, evaluate
from .errors import DimMismatch, DomainViolation, NotDominating, PreconditionError, WitnessSearchFailed
from .linalg import DEFAULT_TOL, as_matrix, eigh, frobenius, matrix_function, minor_delete, psd_check, det
from .rng import make_rng
from .verdict import Verdict, make_witness

SQRT5 = math.sqrt(5.0)
GOLDEN_CONJ = (SQRT5 - 1.0) / 2.0


@dataclass(frozen=True)
class BlockMatrix:
    """An ``mn x mn`` carrier seen as an ``n x n`` grid of ``m x m`` blocks."""

    m: int
    n: int
    carrier: np.ndarray

    def __post_init__(self):
        C = as_matrix(self.carrier)
        if C.shape[0] != self.m * self.n:
            raise DimMismatch(f"carrier of dim {C.shape[0]} is not {self.m} x {self.n} blocks")
        object.__setattr__(self, "carrier", C)

    def block(self, s, t):
        m = self.m
        return self.carrier[s * m : (s + 1) * m, t * m : (t + 1) * m]

    def blocks(self):
        return [[self.block(s, t).copy() for t in range(self.n)] for s in range(self.n)]

    def to_json(self):
        from .io import matrix_to_json

        return matrix_to_json(self.carrier, m=self.m)


def split(H, m):
    H = as_matrix(H)
    if m < 1 or H.shape[0] % m:
        raise DimMismatch(f"dim {H.shape[0]} is not divisible by block size {m}")
    return BlockMatrix(m, H.shape[0] // m, H)


def assemble(blocks):
    """Grid of equal square blocks (nested lists) to a :class:`BlockMatrix`."""
    n = len(blocks)
    if n == 0 or any(len(row) != n for row in blocks):
        raise DimMismatch("blocks must form a nonempty square grid")
    mats = [[as_matrix(b) for b in row] for row in blocks]
    m = mats[0][0].shape[0]
    if any(b.shape != (m, m) for row in mats for b in row):
        raise DimMismatch("all blocks must share one size")
    return BlockMatrix(m, n, np.block(mats))


def apply_blockwise(c, H, tol=DEFAULT_TOL):
    """``c^{[m]}[H]``: the spectral image of every block."""
    if not isinstance(H, BlockMatrix):
        raise TypeError("apply_blockwise expects a BlockMatrix; see apply_blockwise_matrix")
    if H.m == 1:
        from .entrywise import apply_entrywise

        return BlockMatrix(1, H.n, apply_entrywise(c, H.carrier))
    f = lambda vals: evaluate(c, vals)  # noqa: E731
    out = [[matrix_function(H.block(s, t), f, tol) for t in range(H.n)] for s in range(H.n)]
    return BlockMatrix(H.m, H.n, np.block(out))


def apply_blockwise_matrix(c, A, m, tol=DEFAULT_TOL):
    return apply_blockwise(c, split(A, m), tol).carrier


# -- constructions ------------------------------------------------------------

_M44 = [
    [Fraction(3, 2), 0, 1, Fraction(1, 2)],
    [0, 2, Fraction(1, 2), 1],
    [1, Fraction(1, 2), 1, Fraction(4, 5)],
    [Fraction(1, 2), 1, Fraction(4, 5), Fraction(223, 250)],
]


def m44_matrix():
    """The singular PSD matrix ``M`` whose blockwise powers fail near 0."""
    return BlockMatrix(2, 2, np.array([[float(x) for x in row] for row in _M44]))


def gM_eval(alpha):
    """``det f_alpha^{[2]}[M]`` from the closed forms of ``A^a``, ``X^a``, ``N^a``.

    Every block of ``M`` is positive definite, so negative ``alpha`` is fine.
    """
    r = math.sqrt(160729.0)
    x_plus, x_minus = 27.0 + r, 27.0 - r
    lam_plus, lam_minus = 1.0 - x_plus / 500.0, 1.0 - x_minus / 500.0
    Lp, Lm = lam_plus**alpha, lam_minus**alpha
    a, b = 1.5**alpha, 0.5**alpha
    L = 200.0 / r
    bracket = (
        4 * a * a * b**3
        + 4 * a * Lm * Lp
        + 54.0 / r * a * b * (1 - a * b) * (Lm - Lp)
        + (a * b + 1) * ((2 * L - 1) * (Lm * a * a + Lp * b * b) - (2 * L + 1) * (Lp * a * a + Lm * b * b))
    )
    return 2.0**alpha / 4.0 * bracket


def gM_matrix_path(alpha, tol=DEFAULT_TOL):
    """Same quantity through :func:`matrix_function` and an LU determinant."""
    img = apply_blockwise(Character.f(alpha), m44_matrix(), tol)
    return float(np.real(det(img.carrier)))


def epsilon_M(tol=1e-12):
    """Right end of the interval ``(0, eps_M)`` on which ``g_M < 0``, by bisection.

    The upper end starts at the first probe point in ``(0, 1)`` where
    ``g_M >= 0``, or at 1 where ``g_M`` vanishes.
    """
    lo = 1e-3
    if not gM_eval(lo) < 0:
        raise WitnessSearchFailed("g_M is not negative near 0")
    pos = [x for x in np.linspace(0.01, 0.99, 99) if gM_eval(x) >= 0]
    hi = float(pos[0]) if pos else 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gM_eval(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo


def ac_matrix(cval):
    """``A(c) = [[c I, B], [B^T, c I]]`` with ``B = [[0, 0], [1, 1]]``."""
    B = np.array([[0.0, 0.0], [1.0, 1.0]])
    cI = cval * np.eye(2)
    return BlockMatrix(2, 2, np.block([[cI, B], [B.T, cI]]))


def phi1_counterexample():
    """Integer PSD matrix with ``det phi_1^{[2]}[M] = -4/5``."""
    M = np.array([[2, 0, -1, -1], [0, 1, -1, 0], [-1, -1, 2, 0], [-1, 0, 0, 1]], dtype=float)
    return BlockMatrix(2, 2, M)


def mabc_matrix(a, b, c):
    a, b, c = complex(a), complex(b), complex(c)
    M = np.array(
        [
            [1, 0, a, b],
            [0, 1, c, a],
            [a.conjugate(), c.conjugate(), 1, 0],
            [b.conjugate(), a.conjugate(), 0, 1],
        ],
        dtype=np.complex128,
    )
    return BlockMatrix(2, 2, M)


def psi1beta_B(a, c, beta):
    """``Psi_{1,beta}([[a, a], [c, a]])`` from its explicit eigenvectors."""
    if not (a > 0 and c < 0):
        raise PreconditionError("psi1beta_B needs a > 0 and c < 0")
    w = math.sqrt(a * abs(c))
    ch = Character.Psi(1, beta)
    lp, lm = ch(a + 1j * w), ch(a - 1j * w)
    q = math.sqrt(a / abs(c))
    diag = 0.5 * (lp + lm)
    upper = -1j * q * 0.5 * (lp - lm)
    lower = 1j / q * 0.5 * (lp - lm)
    return np.array([[diag, upper], [lower, diag]], dtype=np.complex128)


def mabc_parameter(beta):
    """Midpoint of the admissible interval ``(1/beta, (sqrt5 - 1)/2)``."""
    return 0.5 * (1.0 / abs(beta) + GOLDEN_CONJ)


# -- Loewner matrices and monotonicity ---------------------------------------


@dataclass(frozen=True)
class LoewnerMatrix:
    points: np.ndarray
    entries: np.ndarray


def _f_derivative(c, x):
    if c.family is not Family.F_PLAIN:
        raise DomainViolation("Loewner matrices are implemented for f_alpha")
    return c.alpha * x ** (c.alpha - 1.0)


def loewner_matrix(c, points):
    """Matrix of first divided differences of ``c`` at ``points``."""
    lam = np.asarray(points, dtype=float)
    if np.any(lam <= 0):
        raise DomainViolation("Loewner matrix points must be positive")
    fx = np.real(evaluate(c, lam))
    k = len(lam)
    L = np.empty((k, k))
    for s in range(k):
        for t in range(k):
            if lam[s] == lam[t]:
                L[s, t] = _f_derivative(c, lam[s])
            else:
                L[s, t] = (fx[s] - fx[t]) / (lam[s] - lam[t])
    return LoewnerMatrix(lam, L)


def loewner_det_power(alpha, l1, l2):
    """``det L_{f_alpha}(l1, l2)`` for distinct positive points."""
    if l1 <= 0 or l2 <= 0 or l1 == l2:
        raise PreconditionError("need distinct positive points")
    diff = (l1**alpha - l2**alpha) / (l1 - l2)
    return alpha * alpha * (l1 * l2) ** (alpha - 1.0) - diff * diff


def _sqrt_psd(B, tol=DEFAULT_TOL):
    ed = eigh(B, tol)
    return (ed.vectors * np.sqrt(np.clip(ed.values, 0.0, None))) @ ed.vectors.conj().T


def monotone_gadget(A, B, tol=DEFAULT_TOL):
    """``[[A, X], [X, I]]`` with ``X = B^{1/2}``; PSD because ``A - B >= 0``.

    ``f_alpha^{[2]}`` of it is PSD exactly when ``A^alpha >= B^alpha``.
    """
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise DimMismatch("A and B must have equal size")
    if not psd_check(A - B, tol).is_psd:
        raise NotDominating("A - B is not positive semidefinite")
    if psd_check(B, tol).min_eigenvalue <= tol.psd * max(1.0, frobenius(B)):
        raise NotDominating("B must be positive definite")
    m = A.shape[0]
    X = _sqrt_psd(B, tol)
    return BlockMatrix(m, 2, np.block([[A, X], [X, np.eye(m)]]))


def monotone_violation(alpha, A, B, tol=DEFAULT_TOL):
    """``lambda_min(A^alpha - B^alpha)``."""
    c = Character.f(alpha)
    f = lambda v: evaluate(c, v)  # noqa: E731
    D = matrix_function(A, f, tol) - matrix_function(B, f, tol)
    return psd_check(0.5 * (D + D.conj().T), tol).min_eigenvalue


def random_dominating_pair(rng, m=2, spread=10.0):
    """Seeded ``A >= B > 0``: ``B`` with spectrum in ``(0, spread)``, ``A = B + P``."""
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    B = (Q * rng.uniform(0.05, spread, m)) @ Q.T
    g = rng.standard_normal((m, 1))
    P = rng.uniform(0.0, 1.0) * (g @ g.T)
    return (B + P).astype(np.complex128), B.astype(np.complex128)


def search_monotone_violation(alpha, samples=10_000, seed=0, m=2, stop=True, tol=DEFAULT_TOL):
    """Look for ``A >= B > 0`` with ``A^alpha - B^alpha`` not PSD.

    Returns ``(found, A, B, lambda_min, tried)``: the first violating pair
    when ``stop`` is set, otherwise the most negative one.
    """
    rng = make_rng(seed)
    best = (math.inf, None, None)
    tried = 0
    for _ in range(samples):
        tried += 1
        A, B = random_dominating_pair(rng, m)
        lam = monotone_violation(alpha, A, B, tol)
        if lam < best[0]:
            best = (lam, A, B)
        if stop and lam < -tol.psd * max(1.0, frobenius(A)):
            break
    lam, A, B = best
    thr = tol.psd * max(1.0, frobenius(A))
    return lam < -thr, A, B, lam, tried


# -- witnesses ---------------------------------------------------------------


def pad_blockwise(H, m, n, alpha=1.0):
    """Embed a block witness into ``n x n`` grids of ``m x m`` blocks.

    For ``alpha >= 0`` the new rows and columns are zero.  Negative powers
    are undefined at singular blocks, so there every block is completed
    with an identity and the new grid indices copy the last block row and
    column; both keep PSD and keep the image's negative direction.
    """
    H = H if isinstance(H, BlockMatrix) else split(H, 2)
    if m < H.m or n < H.n:
        raise DimMismatch(f"cannot pad {H.m}x{H.n} blocks into {m}x{n}")
    fill = 1.0 if alpha < 0 else 0.0
    k = H.m
    blocks = []
    for s in range(n):
        row = []
        for t in range(n):
            ss, tt = min(s, H.n - 1), min(t, H.n - 1)
            if alpha >= 0 and (s >= H.n or t >= H.n):
                row.append(np.zeros((m, m), dtype=np.complex128))
                continue
            B = np.zeros((m, m), dtype=np.complex128)
            B[:k, :k] = H.block(ss, tt)
            B[k:, k:] = fill * np.eye(m - k)
            row.append(B)
        blocks.append(row)
    return assemble(blocks)


def _pad_direction(v, H_small, m, n):
    """Place a direction for the small grid into the padded coordinates."""
    out = np.zeros(m * n, dtype=np.complex128)
    k = H_small.m
    for s in range(H_small.n):
        out[s * m : s * m + k] = v[s * k : (s + 1) * k]
    return out


def _finish(H_small, c, m, n, tol, direction=None, **info):
    """Pad, attach a direction and build a verified witness."""
    H = pad_blockwise(H_small, m, n, c.alpha)
    if direction is None:
        img = apply_blockwise(c, H_small, tol).carrier
        direction = psd_check(img, tol).direction
    v = _pad_direction(direction, H_small, m, n)
    w = make_witness(H.carrier, c, m=m, direction=v, tol=tol, **info)
    if not w.verifies(tol):
        raise WitnessSearchFailed(f"{info.get('construction')} witness did not verify for {c}", best=w.value)
    return w


def m44_witness(m, n, c, tol=DEFAULT_TOL, max_steps=60):
    """Witness for ``0 < alpha < 1`` from ``M`` and the chain ``f_{alpha^j}[M]``.

    Powers compose on positive definite blocks, so the image of
    ``f_{alpha^j}^{[2]}[M]`` is ``f_{alpha^{j+1}}^{[2]}[M]``; the first ``j``
    where that fails is used.
    """
    alpha = c.alpha
    if not 0 < alpha < 1:
        raise PreconditionError("M44 witness needs 0 < alpha < 1")
    M = m44_matrix()
    best = math.inf
    for j in range(max_steps):
        inp = apply_blockwise(Character.f(alpha**j), M, tol) if j else M
        if not psd_check(inp.carrier, tol).is_psd:
            break
        img = apply_blockwise(c, inp, tol).carrier
        rep = psd_check(img, tol)
        best = min(best, rep.min_eigenvalue)
        if not rep.is_psd:
            return _finish(inp, c, m, n, tol, rep.direction, construction="M44", chain_step=j)
    raise WitnessSearchFailed(f"M44 chain found no failure for {c}", best=best)


def ac_witness(m, n, c, tol=DEFAULT_TOL):
    """``A(sqrt 2)`` is PSD and any map fixing ``B`` with ``c(sqrt2) = 1`` sends it to ``A(1)``."""
    return _finish(ac_matrix(math.sqrt(2.0)), c, m, n, tol, construction="Ac", cval=math.sqrt(2.0))


def phi1_witness(m, n, c, tol=DEFAULT_TOL):
    return _finish(phi1_counterexample(), c, m, n, tol, construction="Phi1Matrix")


def mabc_witness(m, n, c, tol=DEFAULT_TOL):
    """Scan ``c < 0`` in ``M(a, a, c)`` until the minor without row/column 2 is negative."""
    beta = c.beta
    if abs(beta) < 2:
        raise PreconditionError("Mabc witness needs |beta| >= 2")
    # the minor is 1 - a'^2 - b'^2 with b' -> a beta, so the sign of beta
    # does not matter
    a = mabc_parameter(beta)
    best = math.inf
    for j in range(2, 11):
        cv = -(10.0**-j)
        H = mabc_matrix(a, a, cv)
        if not psd_check(H.carrier, tol).is_psd:
            continue
        img = apply_blockwise(c, H, tol).carrier
        minor = float(np.real(det(minor_delete(img, 1))))
        best = min(best, minor)
        if minor < -tol.psd:
            return _finish(H, c, m, n, tol, construction="Mabc", a=a, c_value=cv, minor=minor)
    raise WitnessSearchFailed(f"Mabc scan found no negative minor for {c}", best=best)


def loewner_gadget_witness(m, n, c, tol=DEFAULT_TOL):
    """Witness for ``alpha > 1`` or ``alpha < 0`` through a non-PSD Loewner matrix.

    With ``B = diag(1, l)`` and ``A = B + eps 1``, ``A^alpha - B^alpha`` is
    ``eps L + O(eps^2)`` where ``L`` is the Loewner matrix at ``(1, l)``.
    The pair ``(l, eps)`` with the largest margin below the PSD threshold
    is kept.
    """
    alpha = c.alpha
    if 0 <= alpha <= 1:
        raise PreconditionError("gadget witness needs alpha > 1 or alpha < 0")
    fa = Character.f(alpha)
    best, best_ratio = None, 0.0
    for l2 in (1.25, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0, 1024.0):
        if np.linalg.eigvalsh(loewner_matrix(fa, [1.0, l2]).entries)[0] >= 0:
            continue
        B = np.diag([1.0, l2]).astype(np.complex128)
        for j in range(1, 9):
            eps = 10.0**-j
            H = monotone_gadget(B + eps * np.ones((2, 2)), B, tol)
            img = apply_blockwise(c, H, tol).carrier
            rep = psd_check(img, tol)
            ratio = -rep.min_eigenvalue / (tol.psd * max(1.0, frobenius(img)))
            if ratio > best_ratio:
                best, best_ratio = (H, rep.direction, l2, eps), ratio
    if best is None or best_ratio <= 1.0:
        raise WitnessSearchFailed(f"gadget scan failed for {c}", best=-best_ratio)
    H, v, l2, eps = best
    return _finish(H, c, m, n, tol, v, construction="LoewnerGadget", points=(1.0, l2), epsilon=eps)


def _real_power_witness(m, n, c, tol):
    """Witness shared by all families for ``alpha`` outside ``{0, 1}``.

    Both constructions have positive definite blocks, on which every family
    acts as ``f_alpha``.
    """
    if 0 < c.alpha < 1:
        return m44_witness(m, n, c, tol), "M44"
    return loewner_gadget_witness(m, n, c, tol), "LoewnerGadget"


def classify_blockwise(m, n, c, tol=DEFAULT_TOL):
    """Decide whether ``c^{[m]}`` preserves positivity on ``mn x mn`` PSD matrices.

    Requires ``m, n >= 2``.  ``Psi`` with non-integral ``beta`` is rejected.
    """
    if m < 2 or n < 2:
        raise PreconditionError("blockwise classification needs m, n >= 2")
    a = c.alpha
    base = {"regime": "blockwise", "m": m, "n": n, "family": c.family.value, "alpha": a}
    if c.family is Family.PSI_COMPLEX:
        if not c.beta_integral:
            raise PreconditionError("blockwise Psi with non-integral beta is not classified")
        b = int(round(c.beta))
        c = Character.Psi(a, b)
        base["beta"] = float(b)

    def fail(w, name):
        return Verdict.fails(w, name=name, **base)

    fam = c.family
    if a == 1:
        if fam is Family.F_PLAIN or fam is Family.PSI_ODD:
            return Verdict.preserves(name="Identity", **base)
        if fam is Family.PSI_COMPLEX and abs(c.beta) == 1:
            return Verdict.preserves(name="Identity", conjugate=c.beta < 0, **base)
        if fam is Family.PSI_COMPLEX and abs(c.beta) >= 2:
            return fail(mabc_witness(m, n, c, tol), "Mabc")
        # phi_1, and Psi_{1,0} which agrees with it on real symmetric blocks
        return fail(phi1_witness(m, n, c, tol), "Phi1Matrix")
    if a == 0:
        if fam is Family.F_PLAIN:
            return Verdict.preserves(name="ZeroPower", positive_definite_blocks_only=True, **base)
        return fail(ac_witness(m, n, c, tol), "Ac")
    w, name = _real_power_witness(m, n, c, tol)
    return fail(w, name)
