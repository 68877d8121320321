"""Positivity preservers among entrywise and blockwise power maps.

Classifiers return a :class:`Verdict`: ``preserves`` with a certificate,
``fails`` with a witness that re-verifies numerically, or ``unknown`` with
the bounds of the open band.
"""

from .blockwise import BlockMatrix, apply_blockwise, classify_blockwise
from .characters import Character, Family
from .commuting import apply_commuting, classify_commuting, classify_trace_map, trace_map
from .entrywise import apply_entrywise, classify_entrywise
from .linalg import DEFAULT_TOL, Tolerances, eigh, matrix_function, psd_check
from .verdict import Status, Verdict, Witness

__all__ = [
    "BlockMatrix",
    "Character",
    "DEFAULT_TOL",
    "Family",
    "Status",
    "Tolerances",
    "Verdict",
    "Witness",
    "apply_blockwise",
    "apply_commuting",
    "apply_entrywise",
    "classify_blockwise",
    "classify_commuting",
    "classify_entrywise",
    "classify_trace_map",
    "eigh",
    "matrix_function",
    "psd_check",
    "trace_map",
]

__version__ = "0.1.0"
