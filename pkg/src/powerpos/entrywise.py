"""Entrywise power maps on P_n(C): application, classification, witnesses."""

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .characters import Character, Family, evaluate, family_Sk, independence_vector, is_integral
from .errors import PreconditionError, WitnessSearchFailed, ZeroDiagonal
from .linalg import DEFAULT_TOL, as_matrix, pad_zeros, psd_check
from .rng import make_rng, random_gram
from .verdict import Verdict, make_witness

INT_TOL = 1e-12


def apply_entrywise(c, A):
    """``c[A] = (c(a_st))``."""
    return np.asarray(evaluate(c, as_matrix(A)), dtype=np.complex128)


# -- bounds -----------------------------------------------------------------


def taylor_depth(n):
    """``floor((sqrt(8n+1) - 5) / 2)``: the largest k with ``n >= C(k+3, 2)``.

    Returns -1 when ``n < 3``.
    """
    k = -1
    while comb(k + 4, 2) <= n:
        k += 1
    return k


def lower_bound(n, beta):
    return max(n - 2, abs(beta) + 2 * taylor_depth(n))


def upper_bound(n, beta):
    return max(n - 2, abs(beta) + 2 * n - 6)


def in_monomial_ladder(alpha, beta):
    """True iff ``alpha`` is one of ``|beta|, |beta| + 2, |beta| + 4, ...``."""
    d = alpha - abs(beta)
    return d > -INT_TOL and is_integral(d / 2, INT_TOL)


def _is_positive_integer(x):
    return x > 0.5 and is_integral(x, INT_TOL)


# -- witnesses --------------------------------------------------------------


def _pad_witness(w, n):
    if w.input.shape[0] == n:
        return w
    A = pad_zeros(w.input, n)
    v = np.zeros(n, dtype=np.complex128)
    v[: w.direction.shape[0]] = w.direction
    return make_witness(A, w.map, direction=v, **w.info)


def fitzhorn_witness(n, alpha, c=None, tol=DEFAULT_TOL, max_halvings=40):
    """Witness on ``A(eps) = (1 + eps s t)`` for non-integral ``alpha < n - 2``.

    ``eps`` runs through ``2^-1, 2^-2, ...`` until the image loses
    positivity.  ``c`` defaults to ``f_alpha``; any family agrees with it on
    these positive matrices.
    """
    if n < 3 or not 0 < alpha < n - 2 or is_integral(alpha, INT_TOL):
        raise PreconditionError(f"need n >= 3 and alpha in (0, {n - 2}) minus the integers")
    c = Character.f(alpha) if c is None else c
    s = np.arange(1, n + 1, dtype=float)
    best = math.inf
    for j in range(1, max_halvings + 1):
        eps = 2.0**-j
        A = 1.0 + eps * np.outer(s, s)
        rep = psd_check(apply_entrywise(c, A), tol)
        best = min(best, rep.min_eigenvalue)
        if not rep.is_psd:
            return make_witness(A, c, direction=rep.direction, tol=tol, construction="fitzhorn", epsilon=eps)
    raise WitnessSearchFailed(f"no witness on 1 + eps s t for n={n}, alpha={alpha}", best=best)


def etop3_matrix(n=3):
    h = 1 / math.sqrt(2)
    T = np.array([[1, h, 0], [h, 1, h], [0, h, 1]], dtype=np.complex128)
    return pad_zeros(T, n)


def etop3_witness(n, c, tol=DEFAULT_TOL):
    """Tridiagonal ``1/sqrt(2)`` witness for ``0 <= alpha < 1``.

    The image has determinant ``1 - 2^(1 - alpha)`` in its leading 3x3 block.
    Negative ``alpha`` is rejected because the padding zeros leave the domain;
    use :func:`i_plus_ones_witness` there.
    """
    if n < 3 or not 0 <= c.alpha < 1:
        raise PreconditionError("etop3 witness needs n >= 3 and 0 <= alpha < 1")
    A = etop3_matrix(n)
    img = apply_entrywise(c, A[:3, :3])
    return make_witness(A, c, tol=tol, construction="etop3", det3=float(np.real(np.linalg.det(img))))


def unity_root_matrix(n=3):
    w = np.exp(2j * math.pi / 3)
    U = np.array([[1, w, w.conjugate()], [w.conjugate(), 1, w], [w, w.conjugate(), 1]])
    return pad_zeros(U, n)


def unity_root_witness(n, c, tol=DEFAULT_TOL):
    """Cube-root-of-unity witness for non-integral ``beta``.

    The leading 3x3 block of the image has determinant ``-2 + 2 cos(2 pi beta)``.
    """
    if n < 3 or c.family is not Family.PSI_COMPLEX or c.beta_integral:
        raise PreconditionError("unity-root witness needs n >= 3 and a non-integral beta")
    if c.alpha < 0 and n > 3:
        raise PreconditionError("padding zeros are outside the domain for negative alpha")
    A = unity_root_matrix(n)
    img = apply_entrywise(c, A[:3, :3])
    return make_witness(A, c, tol=tol, construction="unity_root", det3=float(np.real(np.linalg.det(img))))


def i_plus_ones_witness(n, c, tol=DEFAULT_TOL):
    """``I + 1`` (or ``[[1, 1/2], [1/2, 1]]`` when ``n = 2``) for ``alpha < 0``."""
    if n < 2 or c.alpha >= 0:
        raise PreconditionError("needs n >= 2 and alpha < 0")
    if n == 2:
        A = np.array([[1, 0.5], [0.5, 1]], dtype=np.complex128)
        return make_witness(A, c, tol=tol, construction="pair2x2")
    A = np.eye(n) + np.ones((n, n))
    return make_witness(A, c, tol=tol, construction="i_plus_ones")


def _taylor_k(alpha, beta):
    d = alpha - abs(beta)
    if d < 0:
        # every factor of prod (alpha - beta - 2t) is negative at k = 0
        return 0
    if is_integral(d / 2, INT_TOL):
        raise PreconditionError("alpha - |beta| is a nonnegative even integer")
    return int(math.floor(d / 2)) + 1


def taylor_witness(n, alpha, beta, seed=0, radius=1.0, tol=DEFAULT_TOL, k=None):
    """Witness on ``A_eps = 1 + eps u u^*`` from the Taylor expansion in ``eps``.

    With ``alpha - |beta|`` in ``(2k - 2, 2k)`` the vector ``u`` has
    ``C(k+3, 2)`` entries making the characters of ``S_k`` independent, and
    ``v`` is orthogonal to every ``h[u]`` except ``conj(u)^(k+1)`` (``u^(k+1)``
    for negative ``beta``).  Then ``v^* Psi[A_eps] v`` behaves like
    ``eps^(k+1) prod_t (alpha - |beta| - 2t) < 0``.

    Passing ``k`` runs the construction at that depth without checking the
    sign of the leading coefficient; the result then verifies only if the
    product happens to be negative.
    """
    if not is_integral(beta):
        raise PreconditionError("beta must be an integer")
    beta = float(round(beta))
    if k is None:
        k = _taylor_k(alpha, beta)
    N = comb(k + 3, 2)
    if n < N:
        raise PreconditionError(f"k={k} needs n >= {N}, got n={n}")
    S = family_Sk(k)
    u = independence_vector(S, N, seed=seed, radius=radius)
    sign = 1 if beta < 0 else -1
    keep = [i for i, e in enumerate(S.exponents) if e != (k + 1, sign * (k + 1))]
    cols = S.columns(u)
    others = cols[:, keep + [len(S.exponents)]]
    target = cols[:, S.exponents.index((k + 1, sign * (k + 1)))]
    _, _, vh = np.linalg.svd(others.conj().T)
    v = vh[-1].conj()
    v = v / np.linalg.norm(v)
    overlap = abs(np.vdot(v, target))
    if overlap < 1e-8:
        raise WitnessSearchFailed("direction is orthogonal to the leading character")
    c = Character.Psi(alpha, beta)
    # eps runs geometrically from 10^-0.5 to 1e-12 with 8 steps per decade; the
    # leading term can be small next to the higher orders for larger k, so
    # keep the most negative form rather than the first one found
    best, found = math.inf, None
    for j in range(4, 97):
        eps = 10.0 ** (-j / 8)
        A = np.ones((N, N)) + eps * np.outer(u, u.conj())
        w = make_witness(A, c, direction=v, tol=tol, construction="taylor", k=k, epsilon=eps, seed=seed)
        if w.value < best:
            best = w.value
            if w.verifies(tol):
                found = w
    if found is not None:
        return _pad_witness(found, n)
    raise WitnessSearchFailed(f"Taylor scan found no negative form for alpha={alpha}, beta={beta}", best=best)


def real_rank2_witness(n, c, seed=0, attempts=20000, tol=DEFAULT_TOL):
    """Search rank-2 real matrices ``cos(theta_s - theta_t)`` for a failure.

    Covers integral ``alpha < n - 2`` of the wrong parity, where the real
    restriction of ``Psi_{alpha,beta}`` (``phi`` or ``psi``) fails on P_n(R).
    """
    rng = make_rng(seed)
    best = math.inf
    for _ in range(attempts):
        th = np.sort(rng.uniform(0.0, math.pi, n))
        A = np.cos(th[:, None] - th[None, :]).astype(np.complex128)
        if c.alpha < 0 and np.any(A == 0):
            continue
        rep = psd_check(apply_entrywise(c, A), tol)
        best = min(best, rep.min_eigenvalue)
        if not rep.is_psd:
            return make_witness(A, c, direction=rep.direction, tol=tol, construction="real_rank2", seed=seed)
    raise WitnessSearchFailed(f"rank-2 search failed for {c} at n={n}", best=best)


# -- classifier -------------------------------------------------------------


def classify_entrywise(n, c, seed=0, tol=DEFAULT_TOL):
    """Decide whether ``c[-]`` preserves positivity on P_n(C).

    ``phi``/``psi`` are treated as ``Psi`` with ``beta`` 0/1 and ``f`` as
    ``Psi_{alpha,0}``; the certificate records the conversion.  In the band
    between the lower and upper critical-exponent bounds (``n >= 4``) the
    verdict is ``unknown``.
    """
    conv = {}
    if c.family is not Family.PSI_COMPLEX:
        conv = {"converted_from": c.family.value}
        if c.family is Family.F_PLAIN:
            conv["note"] = "f_alpha classified as Psi_{alpha,0}"
        c = c.as_psi()
    a, b = c.alpha, c.beta
    base = {"regime": "entrywise", "n": n, "alpha": a, "beta": b, **conv}

    if n <= 1:
        return Verdict.preserves(name="Trivial1x1", **base)
    if a < 0:
        return Verdict.fails(i_plus_ones_witness(n, c, tol), name="NegativePower", **base)
    if n == 2:
        return Verdict.preserves(name="Order2", **base)
    if not c.beta_integral:
        return Verdict.fails(unity_root_witness(n, c, tol), name="UnityRoot", **base)
    b = float(round(b))
    c = Character.Psi(a, b)
    if a == 0 and b == 0:
        return Verdict.fails(etop3_witness(n, c, tol), name="Etop3", **base)
    if in_monomial_ladder(a, b):
        m = int(round((a - abs(b)) / 2))
        return Verdict.preserves(name="SchurMonomial", m=m, **base)
    hi = upper_bound(n, b)
    if a >= hi:
        name = "Zhan3" if n == 3 else "ThresholdC1"
        return Verdict.preserves(name=name, threshold=hi, **base)
    if a < 1:
        return Verdict.fails(etop3_witness(n, c, tol), name="Etop3", **base)
    lo = lower_bound(n, b)
    if a < lo:
        return Verdict.fails(fail_region_witness(n, c, seed, tol), name="CriticalLowerBound", lower=lo, **base)
    return Verdict.unknown(lo, hi, name="OpenBand", **base)


def fail_region_witness(n, c, seed=0, tol=DEFAULT_TOL):
    """Witness for ``1 <= alpha < lower_bound(n, beta)`` off the monomial ladder."""
    a, b = c.alpha, c.beta
    if 0 < a < n - 2 and not is_integral(a, INT_TOL):
        return fitzhorn_witness(n, a, c, tol)
    k = _taylor_k(a, b)
    if n >= comb(k + 3, 2):
        try:
            return taylor_witness(n, a, b, seed=seed, tol=tol)
        except WitnessSearchFailed:
            # the eps^(k+1) term sinks below double precision for larger k
            if not is_integral(a, INT_TOL):
                raise
    return real_rank2_witness(n, c, seed=seed, tol=tol)


# -- 3x3 reduction ------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationTriple:
    t: tuple
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(x) for x in self.t))
        object.__setattr__(self, "theta", float(self.theta))

    def det(self):
        t1, t2, t3 = self.t
        return 1 - (t1 * t1 + t2 * t2 + t3 * t3) + 2 * t1 * t2 * t3 * math.cos(self.theta)

    def is_psd(self, tol=1e-12):
        return all(-tol <= x <= 1 + tol for x in self.t) and self.det() >= -tol

    def power(self, alpha, beta):
        """The triple whose T-matrix is ``Psi_{alpha,beta}[T(t, theta)]``."""
        return CorrelationTriple(tuple(x**alpha for x in self.t), beta * self.theta)


def build_T(ct):
    t1, t2, t3 = ct.t
    e = np.exp(1j * ct.theta)
    return np.array([[1, t3, t2 * e], [t3, 1, t1], [t2 * np.conj(e), t1, 1]], dtype=np.complex128)


def reduce_to_T(A):
    """Normalize a 3x3 Hermitian matrix with positive diagonal to ``T(t, theta)``."""
    A = as_matrix(A)
    if A.shape != (3, 3):
        raise ValueError("reduce_to_T needs a 3x3 matrix")
    r = np.real(np.diag(A))
    if np.any(r <= 0):
        raise ZeroDiagonal("diagonal entries must be positive")
    # entries: a12 = s3 e^{i th3}, a13 = s2 e^{i th2}, a23 = s1 e^{i th1}
    z1, z2, z3 = A[1, 2], A[0, 2], A[0, 1]
    s = np.abs([z1, z2, z3])
    th = [float(np.angle(z)) if z != 0 else 0.0 for z in (z1, z2, z3)]
    th = [math.pi if x <= -math.pi else x for x in th]
    prod = math.sqrt(r[0] * r[1] * r[2])
    t = tuple(float(s[j] * math.sqrt(r[j]) / prod) for j in range(3))
    return CorrelationTriple(t, th[0] + th[2] - th[1])


def gbeta_eval(ct, beta, alpha):
    """``1 - sum t_j^(2 alpha) + 2 (t1 t2 t3)^alpha cos(beta theta)``."""
    t1, t2, t3 = ct.t
    return 1 - (t1 ** (2 * alpha) + t2 ** (2 * alpha) + t3 ** (2 * alpha)) + 2 * (t1 * t2 * t3) ** alpha * math.cos(
        beta * ct.theta
    )


def gbeta_dirichlet(ct, beta):
    """``g_beta`` as a generalized Dirichlet polynomial: (coeffs, bases).

    Bases are strictly decreasing; equal bases are merged.
    """
    t1, t2, t3 = ct.t
    terms = [(1.0, 1.0), (-1.0, t1 * t1), (-1.0, t2 * t2), (-1.0, t3 * t3), (2 * math.cos(beta * ct.theta), t1 * t2 * t3)]
    merged = {}
    for a, base in terms:
        if base > 0:
            merged[base] = merged.get(base, 0.0) + a
    bases = sorted(merged, reverse=True)
    return [merged[x] for x in bases], bases


def _sign_changes(seq, zero_tol=0.0):
    signs = [1 if x > zero_tol else -1 for x in seq if abs(x) > zero_tol]
    return sum(1 for p, q in zip(signs, signs[1:]) if p != q)


def dirichlet_root_bound(coeffs, bases, zero_tol=0.0):
    """Descartes bounds for ``sum a_j t_j^x``: (positive zeros, real zeros).

    The first count is the number of sign changes of the partial sums, the
    second of the coefficients themselves; zero terms are discarded.
    """
    bases = list(bases)
    if any(b <= 0 for b in bases) or any(p <= q for p, q in zip(bases, bases[1:])):
        raise ValueError("bases must be positive and strictly decreasing")
    partial = np.cumsum(coeffs)
    return _sign_changes(partial, zero_tol), _sign_changes(coeffs, zero_tol)


# -- induction step check ----------------------------------------------------------


def lift_psi_to_phi_check(n, alpha, samples=200, seed=0, tol=DEFAULT_TOL):
    """Sample the step "Psi_{alpha-1,1} on P_{n-1}  =>  Psi_{alpha,0} on P_n".

    Returns ``True`` when the hypothesis fails to hold (nothing to check) or
    every sampled image is PSD.
    """
    if alpha <= 1:
        raise PreconditionError("alpha must exceed 1")
    hyp = classify_entrywise(n - 1, Character.Psi(alpha - 1, 1), seed=seed, tol=tol)
    if hyp.status.value != "preserves":
        return True
    rng = make_rng(seed)
    c = Character.Psi(alpha, 0)
    for _ in range(samples):
        A = random_gram(rng, n)
        if not psd_check(apply_entrywise(c, A), tol).is_psd:
            return False
    return True
