"""Counter-based random streams.

Every block of ``BLOCK`` samples comes from its own Philox key derived from
(seed, stream, block index), so a prefix of a sample sequence does not
depend on how many samples were requested in total or on how the work
is split.
"""

from __future__ import annotations

import numpy as np

BLOCK = 1 << 16
_MASK64 = (1 << 64) - 1


def _generator(seed, stream, block):
    if not 0 <= seed <= _MASK64:
        raise ValueError("seed must be a non-negative 64-bit integer")
    key = seed | (((stream << 40) | block) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(seed, n, dim, stream=0):
    """``(n, dim)`` array of U(0,1) variates, blockwise reproducible."""
    n = int(n)
    out = np.empty((n, dim))
    for b, start in enumerate(range(0, n, BLOCK)):
        stop = min(start + BLOCK, n)
        u = _generator(int(seed), int(stream), b).random((BLOCK, dim))
        out[start:stop] = u[: stop - start]
    return out


def open_uniforms(seed, n, dim, stream=0):
    """Uniforms on the open interval (0, 1); safe for logs and negative powers."""
    u = uniforms(seed, n, dim, stream)
    np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg, out=u)
    return u


def unit_vectors(u):
    """Map ``(n, N-1)`` uniforms to uniformly distributed unit vectors in R^N."""
    if u.shape[1] == 1:
        t = 2.0 * np.pi * u[:, 0]
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    z = 2.0 * u[:, 0] - 1.0
    t = 2.0 * np.pi * u[:, 1]
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(t), r * np.sin(t), z], axis=1)
