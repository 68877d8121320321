"""Seeded random streams.

All draws go through numpy's Philox4x32-10 counter-based generator.  The
stream for ``(seed, stream)`` is keyed by ``SeedSequence([seed, stream])``,
so worker ``k`` of a fanned-out run draws from ``make_rng(seed, k)``.
"""

import numpy as np


def make_rng(seed, stream=0):
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(stream)])
    return np.random.Generator(np.random.Philox(ss))


def complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_gram(rng, n, rank=None, real=False, nonnegative=False, normalize=True):
    """PSD sample ``X X^*`` with ``X`` of shape ``n x rank``.

    ``rank=None`` draws the rank uniformly from ``1..n``; low-rank samples sit
    on the boundary of the cone where failures show up.  ``normalize`` rescales
    to unit diagonal when the diagonal is positive.
    """
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    if real or nonnegative:
        X = rng.standard_normal((n, rank))
        if nonnegative:
            X = np.abs(X)
    else:
        X = complex_gaussian(rng, (n, rank))
    G = X @ X.conj().T
    if normalize:
        d = np.sqrt(np.real(np.diag(G)))
        if np.all(d > 0):
            G = G / np.outer(d, d)
    G = 0.5 * (G + G.conj().T)
    return G.astype(np.complex128)
