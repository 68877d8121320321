"""Seeded verification runs behind the command line.

Every run is a pure function of its :class:`RunConfig`.  Sample ``i`` of a
``verify`` run draws from ``make_rng(seed, i)``, so the report does not
depend on how many worker threads share the work.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blockwise import (
    apply_blockwise,
    classify_blockwise,
    loewner_det_power,
    monotone_gadget,
    split,
)
from .characters import Character, Family
from .commuting import classify_commuting, classify_trace_map, embed_rank1, trace_map
from .entrywise import apply_entrywise, classify_entrywise
from .errors import PreconditionError
from .io import matrix_from_json, matrix_to_json, plain, vector_from_json, vector_to_json, verdict_to_json
from .linalg import DEFAULT_TOL, frobenius, psd_check
from .rng import complex_gaussian, make_rng, random_gram
from .verdict import Status, apply_map

REGIMES = ("entrywise", "blockwise", "commuting", "trace")
TOLERANCE_ENV = "HPL_TOLERANCE"


@dataclass(frozen=True)
class RunConfig:
    command: str
    regime: str = "entrywise"
    m: int = 1
    n: int = 3
    family: str = "Psi"
    alpha: float = 1.0
    beta: float = 0.0
    samples: int = 1000
    seed: int = 0
    output: str | None = None
    input: str | None = None
    workers: int = 1
    psd_tol: float | None = None

    def character(self):
        beta = self.beta if Family(self.family) is Family.PSI_COMPLEX else 0.0
        return Character(Family(self.family), self.alpha, beta)

    def tolerances(self):
        tol = self.psd_tol
        if tol is None and os.environ.get(TOLERANCE_ENV):
            tol = float(os.environ[TOLERANCE_ENV])
        return DEFAULT_TOL if tol is None else DEFAULT_TOL.replace(psd=tol)

    def block_size(self):
        return 1 if self.regime == "entrywise" else self.m


def run_classify(cfg):
    c, tol = cfg.character(), cfg.tolerances()
    if cfg.regime == "entrywise":
        return classify_entrywise(cfg.n, c, seed=cfg.seed, tol=tol)
    if cfg.regime == "blockwise":
        return classify_blockwise(cfg.m, cfg.n, c, tol=tol)
    if cfg.regime == "commuting":
        return classify_commuting(cfg.m, cfg.n, c, seed=cfg.seed, tol=tol)
    if cfg.regime == "trace":
        return classify_trace_map(cfg.m, cfg.n, c, seed=cfg.seed, tol=tol)
    raise PreconditionError(f"unknown regime {cfg.regime!r}")


# -- witnesses ---------------------------------------------------------------


def witness_payload(cfg, verdict):
    """Witness JSON for a ``fails`` verdict, in the regime's own terms.

    For the trace regime the entrywise witness ``A`` is embedded as blocks
    ``a_st E_11``, whose block traces give back ``A``.
    """
    w = verdict.witness
    obj = {"regime": cfg.regime, "map": w.map.to_json(), "direction": vector_to_json(w.direction)}
    if cfg.regime == "trace":
        obj["matrix"] = matrix_to_json(embed_rank1(w.input, cfg.m).carrier, m=cfg.m)
    else:
        obj["matrix"] = matrix_to_json(w.input, m=w.m if w.m != 1 else None)
    obj["value"] = float(w.value)
    obj["certificate"] = verdict.certificate
    obj["info"] = w.info
    return obj


def image_for(regime, c, A, m, tol=DEFAULT_TOL):
    if regime == "trace":
        return apply_entrywise(c, trace_map(split(A, m)))
    return apply_map(c, A, m or 1, tol)


def reverify(obj, tol=DEFAULT_TOL):
    """Recompute a witness from its JSON: input PSD, image, quadratic form."""
    A, m = matrix_from_json(obj["matrix"])
    c = Character.from_json(obj["map"])
    v = vector_from_json(obj["direction"])
    v = v / np.linalg.norm(v)
    input_psd = psd_check(A, tol)
    img = image_for(obj["regime"], c, A, m, tol)
    value = float(np.real(v.conj() @ img @ v))
    thr = tol.psd * max(1.0, frobenius(img))
    report = {
        "input_psd": input_psd.is_psd,
        "input_min_eigenvalue": input_psd.min_eigenvalue,
        "image_min_eigenvalue": psd_check(img, tol).min_eigenvalue,
        "value": value,
        "threshold": -thr,
        "verified": bool(input_psd.is_psd and value < -thr),
    }
    if A.shape[0] >= 3 and obj.get("info", {}).get("det3") is not None:
        report["det3"] = float(np.real(np.linalg.det(img[:3, :3])))
    return report


def run_witness(cfg):
    """Classify, write the witness, read it back and verify it from scratch.

    Raises
    ------
    PreconditionError
        If the verdict is not ``fails``.
    """
    verdict = run_classify(cfg)
    if verdict.status is not Status.FAILS:
        raise PreconditionError(f"verdict is {verdict.status.value}; there is no witness")
    obj = witness_payload(cfg, verdict)
    text = json.dumps(plain(obj), sort_keys=True, indent=2)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n")
        reloaded = json.loads(Path(cfg.output).read_text())
    else:
        reloaded = json.loads(text)
    # a fresh tolerance object, nothing carried over from the search
    tol = cfg.tolerances().replace()
    return {"witness": reloaded, "verification": reverify(reloaded, tol), "path": cfg.output}


# -- sampling ---------------------------------------------------------------


def _real_psd(rng, n, nonnegative):
    return np.real(random_gram(rng, n, real=True, nonnegative=nonnegative))


def _orthonormal(rng, m):
    Q, _ = np.linalg.qr(complex_gaussian(rng, (m, m)))
    return Q


def sample_input(regime, c, m, n, rng):
    """One PSD input matrix for the given regime.

    entrywise: Gram matrices (real for phi/psi, nonnegative real for f).
    blockwise: ``sum_k P_k (x) Q_k`` with real ``P_k`` and PSD ``Q_k``, whose
    blocks are Hermitian; for ``m = 2`` and complex families a full complex
    Gram matrix instead, since non-normal 2x2 blocks are supported.
    commuting: ``sum_k A_k (x) u_k u_k^*`` for an orthonormal ``u``.
    trace: complex Gram matrices of size ``mn`` (real for real families).
    """
    fam = c.family
    real = fam is not Family.PSI_COMPLEX
    nonneg = fam is Family.F_PLAIN
    if regime == "entrywise":
        return random_gram(rng, n, real=real, nonnegative=nonneg)
    if regime == "blockwise":
        if m == 2 and not real:
            return random_gram(rng, m * n)
        H = np.zeros((m * n, m * n), dtype=np.complex128)
        for _ in range(int(rng.integers(1, 4))):
            P = _real_psd(rng, n, nonneg)
            Q = random_gram(rng, m, real=real, rank=m, normalize=False)
            H += np.kron(P, Q)
        return H
    if regime == "commuting":
        U = _orthonormal(rng, m) if not real else np.linalg.qr(rng.standard_normal((m, m)))[0]
        H = np.zeros((m * n, m * n), dtype=np.complex128)
        for k in range(m):
            P = _real_psd(rng, n, nonneg)
            H += np.kron(P, np.outer(U[:, k], U[:, k].conj()))
        return 0.5 * (H + H.conj().T)
    if regime == "trace":
        return random_gram(rng, m * n, real=real, nonnegative=nonneg)
    raise PreconditionError(f"unknown regime {regime!r}")


def _one_sample(cfg, c, tol, i):
    rng = make_rng(cfg.seed, i)
    m = cfg.block_size()
    A = sample_input(cfg.regime, c, m, cfg.n, rng)
    img = image_for(cfg.regime, c, A, m, tol)
    img = 0.5 * (img + img.conj().T)
    lam = psd_check(img, tol).min_eigenvalue
    return lam, lam / max(1.0, frobenius(img))


def run_verify(cfg):
    """Sample PSD inputs, apply the map and aggregate ``lambda_min`` of the images."""
    if cfg.samples < 1:
        raise PreconditionError("samples must be >= 1")
    c, tol = cfg.character(), cfg.tolerances()
    idx = range(cfg.samples)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(lambda i: _one_sample(cfg, c, tol, i), idx))
    else:
        results = [_one_sample(cfg, c, tol, i) for i in idx]
    lam = np.array([r[0] for r in results])
    rel = np.array([r[1] for r in results])
    edges = [-np.inf, -1e-2, -1e-5, -1e-8, -tol.psd, 0.0, np.inf]
    counts, _ = np.histogram(rel, bins=edges)
    return {
        "regime": cfg.regime,
        "map": c.to_json(),
        "m": cfg.block_size(),
        "n": cfg.n,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "min_lambda_min": float(lam.min()),
        "min_relative_lambda_min": float(rel.min()),
        "violations": int(np.sum(rel < -tol.psd)),
        "histogram": {
            "edges": ["-inf", -1e-2, -1e-5, -1e-8, -tol.psd, 0.0, "inf"],
            "counts": [int(x) for x in counts],
        },
    }


# -- monotonicity -------------------------------------------------------------


def run_monotone(cfg, grid=tuple(range(1, 9))):
    """Signs of ``det L_{f_alpha}(l1, l2)`` over a point grid, with a gadget check.

    The first pair (in grid order) with a negative determinant is reported
    together with the ``lambda_min`` of ``A^alpha - B^alpha`` for the gadget
    ``B = diag(l1, l2)``, ``A = B + eps 1``.
    """
    if Family(cfg.family) is not Family.F_PLAIN:
        raise PreconditionError("monotone reports are for f_alpha")
    alpha, tol = cfg.alpha, cfg.tolerances()
    dets, violation = {}, None
    for i, l1 in enumerate(grid):
        for l2 in grid[i + 1 :]:
            d = loewner_det_power(alpha, float(l1), float(l2))
            scale = max(1.0, (alpha * alpha) * (l1 * l2) ** max(alpha - 1.0, 0.0))
            dets[f"{l1},{l2}"] = d
            if violation is None and d < -1e-12 * scale:
                violation = (l1, l2, d)
    report = {
        "alpha": alpha,
        "grid": list(grid),
        "min_det": min(dets.values()),
        "max_abs_det": max(abs(x) for x in dets.values()),
        "status": "violated" if violation else "consistent",
    }
    if violation:
        l1, l2, d = violation
        B = np.diag([float(l1), float(l2)]).astype(np.complex128)
        best = None
        for j in range(1, 9):
            A = B + 10.0**-j * np.ones((2, 2))
            img = apply_blockwise(Character.f(alpha), monotone_gadget(A, B, tol), tol).carrier
            lam = psd_check(img, tol).min_eigenvalue
            if best is None or lam < best[1]:
                best = (10.0**-j, lam)
        report.update(violating_pair=[l1, l2], det=d, gadget_epsilon=best[0], gadget_lambda_min=best[1])
    return report


# -- apply ---------------------------------------------------------------------


def run_apply(cfg):
    """Read a matrix JSON from ``cfg.input`` and apply the map for the regime."""
    if not cfg.input:
        raise PreconditionError("apply needs --input")
    A, m = matrix_from_json(json.loads(Path(cfg.input).read_text()))
    m = m or cfg.block_size()
    c, tol = cfg.character(), cfg.tolerances()
    img = image_for(cfg.regime, c, A, m, tol)
    return matrix_to_json(img, m=None if cfg.regime in ("entrywise", "trace") else m)
