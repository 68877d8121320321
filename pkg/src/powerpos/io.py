"""JSON encodings of matrices, characters, witnesses and verdicts.

Floats are written with Python's shortest round-trip repr, so a reloaded
matrix is bit-identical to the one written.  Keys are sorted to make output
byte-stable for a fixed input.
"""

import json

import numpy as np

from .characters import Character
from .linalg import as_matrix
from .verdict import Status, Verdict, Witness


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(A, m=None):
    A = as_matrix(A)
    obj = {"n": int(A.shape[0]), "entries": [[_pair(z) for z in row] for row in A]}
    if m is not None:
        obj["m"] = int(m)
    return obj


def matrix_from_json(obj):
    """Returns ``(matrix, m)``; ``m`` is ``None`` for plain matrices."""
    n = int(obj["n"])
    E = np.array(obj["entries"], dtype=float)
    if E.shape != (n, n, 2):
        raise ValueError(f"entries must have shape ({n}, {n}, 2), got {E.shape}")
    return as_matrix(E[..., 0] + 1j * E[..., 1]), obj.get("m")


def vector_to_json(v):
    return [_pair(z) for z in np.asarray(v).ravel()]


def vector_from_json(obj):
    E = np.array(obj, dtype=float).reshape(-1, 2)
    return E[:, 0] + 1j * E[:, 1]


def plain(x):
    """Recursively convert numpy scalars, arrays, tuples and enums to JSON types."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, Status):
        return x.value
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.complexfloating, complex)):
        return _pair(x)
    if isinstance(x, np.ndarray):
        return plain(x.tolist())
    return x


def witness_to_json(w):
    m = w.m if w.m != 1 else None
    return {
        "matrix": matrix_to_json(w.input, m=m),
        "map": w.map.to_json(),
        "direction": vector_to_json(w.direction),
        "value": float(w.value),
        "info": plain(w.info),
    }


def witness_from_json(obj):
    A, m = matrix_from_json(obj["matrix"])
    return Witness(
        input=A,
        map=Character.from_json(obj["map"]),
        direction=vector_from_json(obj["direction"]),
        value=float(obj["value"]),
        m=int(m) if m is not None else 1,
        info=dict(obj.get("info", {})),
    )


def verdict_to_json(v):
    obj = {"status": v.status.value, "certificate": plain(v.certificate)}
    if v.witness is not None:
        obj["witness"] = witness_to_json(v.witness)
    if v.bounds is not None:
        obj["bounds"] = [float(b) for b in v.bounds]
    return obj


def verdict_from_json(obj):
    w = witness_from_json(obj["witness"]) if "witness" in obj else None
    bounds = tuple(obj["bounds"]) if "bounds" in obj else None
    return Verdict(Status(obj["status"]), dict(obj.get("certificate", {})), w, bounds)


def dumps(obj):
    return json.dumps(plain(obj), sort_keys=True, indent=2)
