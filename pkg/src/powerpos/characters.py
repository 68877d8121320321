"""Power maps on the complex plane and real line.

Four families are supported:

``Psi``  re^{i theta} -> r^alpha e^{i beta theta}, theta in (-pi, pi]
``phi``  x -> |x|^alpha            (even extension, real input)
``psi``  x -> sgn(x) |x|^alpha     (odd extension, real input)
``f``    x -> x^alpha              (x >= 0)

Every family sends 0 to 0.  ``Psi`` with integral ``beta`` is multiplicative
on C and restricts to ``phi``/``psi`` on the reals according to the parity of
``beta``.
"""

import enum
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DomainViolation, IndependenceSearchFailed

BETA_INT_TOL = 1e-12
# imaginary parts this small (relative) count as real input for phi/psi/f
REAL_INPUT_TOL = 1e-12


class Family(str, enum.Enum):
    PSI_COMPLEX = "Psi"
    PHI_EVEN = "phi"
    PSI_ODD = "psi"
    F_PLAIN = "f"


def is_integral(x, tol=BETA_INT_TOL):
    return abs(x - round(x)) <= tol


def principal_arg(z):
    """Argument in the half-open interval (-pi, pi]."""
    theta = np.angle(z)
    return np.where(theta <= -np.pi, np.pi, theta)


@dataclass(frozen=True)
class Character:
    family: Family
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @classmethod
    def Psi(cls, alpha, beta):
        return cls(Family.PSI_COMPLEX, alpha, beta)

    @classmethod
    def phi(cls, alpha):
        return cls(Family.PHI_EVEN, alpha)

    @classmethod
    def psi(cls, alpha):
        return cls(Family.PSI_ODD, alpha)

    @classmethod
    def f(cls, alpha):
        return cls(Family.F_PLAIN, alpha)

    @property
    def beta_integral(self):
        return is_integral(self.beta)

    def as_psi(self):
        """The ``Psi`` character agreeing with this map on its real domain."""
        if self.family is Family.PSI_COMPLEX:
            return self
        beta = 1.0 if self.family is Family.PSI_ODD else 0.0
        return Character.Psi(self.alpha, beta)

    def conjugate(self):
        """``z -> conj(c(z))``; flips the sign of ``beta``."""
        if self.family is Family.PSI_COMPLEX:
            return Character.Psi(self.alpha, -self.beta)
        return self

    def __call__(self, z):
        return evaluate(self, z)

    def to_json(self):
        return {"family": self.family.value, "alpha": self.alpha, "beta": self.beta}

    @classmethod
    def from_json(cls, obj):
        return cls(Family(obj["family"]), obj["alpha"], obj.get("beta", 0.0))

    def __str__(self):
        if self.family is Family.PSI_COMPLEX:
            return f"Psi[{self.alpha:g},{self.beta:g}]"
        return f"{self.family.value}[{self.alpha:g}]"


def _real_part_checked(z, name):
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z.imag) > REAL_INPUT_TOL * np.maximum(1.0, np.abs(z))):
        raise DomainViolation(f"{name} is defined on real input only")
    return z.real


def evaluate(c, z):
    """Evaluate a character at a scalar or elementwise on an array.

    Scalar input returns a Python ``complex``.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=np.complex128)
    r = np.abs(z)
    zero = r == 0
    if c.alpha < 0 and np.any(zero):
        raise DomainViolation(f"{c} is undefined at 0 for negative alpha")
    safe_r = np.where(zero, 1.0, r)
    mag = np.where(zero, 0.0, safe_r ** c.alpha)

    if c.family is Family.PSI_COMPLEX:
        out = mag * np.exp(1j * c.beta * principal_arg(z))
    else:
        x = _real_part_checked(z, c.family.value)
        if c.family is Family.F_PLAIN:
            if np.any(x < 0):
                raise DomainViolation("f_alpha is undefined on negative reals")
            out = mag.astype(np.complex128)
        elif c.family is Family.PHI_EVEN:
            out = mag.astype(np.complex128)
        else:
            out = (np.sign(x) * mag).astype(np.complex128)
    out = np.where(zero, 0.0, out)
    return complex(out) if scalar else out


def multiplicativity_probe(c, samples=1000, seed=0):
    """Largest ``|c(zw) - c(z)c(w)|`` over seeded pairs off the negative axis."""
    from .rng import make_rng

    rng = make_rng(seed)
    r1, r2 = rng.uniform(0.5, 2.0, size=(2, samples))
    t1, t2 = rng.uniform(-np.pi, np.pi, size=(2, samples))
    z = r1 * np.exp(1j * t1)
    w = r2 * np.exp(1j * t2)
    dev = np.abs(evaluate(c, z * w) - evaluate(c, z) * evaluate(c, w))
    return float(np.max(dev))


class _One:
    """The constant map K = 1."""

    def __call__(self, z):
        return np.ones_like(np.asarray(z, dtype=np.complex128))

    def __repr__(self):
        return "One"


ONE = _One()


@dataclass(frozen=True)
class CharacterFamilySk:
    """Characters ``Psi_{l, l-2j}`` for ``1 <= l <= k+1``, ``0 <= j <= l``, plus 1."""

    k: int
    exponents: tuple

    @property
    def members(self):
        return [Character.Psi(a, b) for a, b in self.exponents] + [ONE]

    def __len__(self):
        return len(self.exponents) + 1

    def top(self):
        return Character.Psi(self.k + 1, self.k + 1)

    def columns(self, u, exclude_top=False):
        """``n x |S|`` matrix whose columns are ``h[u]``."""
        u = np.asarray(u, dtype=np.complex128)
        cols = []
        for (a, b), h in zip(self.exponents + ((None, None),), self.members):
            if exclude_top and a == self.k + 1 and b == self.k + 1:
                continue
            cols.append(h(u))
        return np.column_stack(cols)


def family_Sk(k):
    if k < 0:
        raise ValueError("k must be nonnegative")
    exps = tuple((l, l - 2 * j) for l in range(1, k + 2) for j in range(l + 1))
    fam = CharacterFamilySk(k, exps)
    assert len(fam) == comb(k + 3, 2)
    return fam


def independence_ratio(S, u):
    """Smallest over largest singular value of the column matrix of ``S`` at ``u``."""
    sv = np.linalg.svd(S.columns(u), compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


def independence_vector(S, n, seed=0, radius=1.0, min_ratio=1e-6, attempts=100):
    """Draw ``u`` in the punctured disc so that ``{h[u] : h in S}`` is independent.

    Entries are ``r e^{i phi}`` with ``r`` uniform on
    ``[radius/2, radius (1 - 1e-3)]`` and ``phi`` uniform.
    """
    from .rng import make_rng

    if n < len(S):
        raise ValueError(f"need n >= |S| = {len(S)}, got {n}")
    rng = make_rng(seed)
    best = 0.0
    for _ in range(attempts):
        r = rng.uniform(radius / 2, radius * (1 - 1e-3), size=n)
        ph = rng.uniform(-math.pi, math.pi, size=n)
        u = r * np.exp(1j * ph)
        ratio = independence_ratio(S, u)
        if ratio >= min_ratio:
            return u
        best = max(best, ratio)
    raise IndependenceSearchFailed(f"no independent draw in {attempts} attempts (best ratio {best:.3g})")
