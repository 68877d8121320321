"""Classifier output types: verdicts and failure witnesses."""

import enum
from dataclasses import dataclass, field

import numpy as np

from .characters import Character
from .linalg import DEFAULT_TOL, as_matrix, frobenius, psd_check


class Status(str, enum.Enum):
    PRESERVES = "preserves"
    FAILS = "fails"
    UNKNOWN = "unknown"


def apply_map(c, A, m=1, tol=DEFAULT_TOL):
    """Apply ``c`` entrywise (``m == 1``) or blockwise with ``m x m`` blocks."""
    if m == 1:
        from .entrywise import apply_entrywise

        return apply_entrywise(c, A)
    from .blockwise import apply_blockwise_matrix

    return apply_blockwise_matrix(c, A, m, tol)


@dataclass(frozen=True)
class Witness:
    """A PSD input whose image under ``map`` has a negative quadratic form.

    ``value`` is ``Re(v^* map[input] v)`` for the unit vector ``direction``.
    ``m`` is the block size the map is applied with (1 means entrywise).
    """

    input: np.ndarray
    map: Character
    direction: np.ndarray
    value: float
    m: int = 1
    info: dict = field(default_factory=dict)

    def image(self, tol=DEFAULT_TOL):
        return apply_map(self.map, self.input, self.m, tol)

    def check(self, tol=DEFAULT_TOL):
        """Re-derive everything from ``input``, ``map`` and ``direction``.

        Returns ``(ok, recomputed_value, threshold)``.
        """
        A = as_matrix(self.input)
        if not psd_check(A, tol).is_psd:
            return False, float("nan"), 0.0
        img = self.image(tol)
        v = np.asarray(self.direction, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        val = float(np.real(v.conj() @ img @ v))
        thr = tol.psd * max(1.0, frobenius(img))
        return val < -thr, val, thr

    def verifies(self, tol=DEFAULT_TOL):
        return self.check(tol)[0]


def make_witness(A, c, m=1, direction=None, tol=DEFAULT_TOL, **info):
    """Build a witness; without ``direction`` use the bottom eigenvector of the image."""
    A = as_matrix(A)
    img = apply_map(c, A, m, tol)
    if direction is None:
        rep = psd_check(img, tol)
        v = rep.direction
    else:
        v = np.asarray(direction, dtype=np.complex128)
        v = v / np.linalg.norm(v)
    val = float(np.real(v.conj() @ img @ v))
    return Witness(input=A, map=c, direction=v, value=val, m=m, info=dict(info))


@dataclass(frozen=True)
class Verdict:
    status: Status
    certificate: dict = field(default_factory=dict)
    witness: Witness | None = None
    bounds: tuple | None = None

    @classmethod
    def preserves(cls, **cert):
        return cls(Status.PRESERVES, cert)

    @classmethod
    def fails(cls, witness, **cert):
        return cls(Status.FAILS, cert, witness=witness)

    @classmethod
    def unknown(cls, lower, upper, **cert):
        if not lower < upper:
            raise ValueError(f"unknown band needs lower < upper, got ({lower}, {upper})")
        return cls(Status.UNKNOWN, cert, bounds=(float(lower), float(upper)))

    @property
    def name(self):
        return self.certificate.get("name")
