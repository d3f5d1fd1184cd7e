"""Small dense operator algebra on bipartite spaces."""
from __future__ import annotations

import numpy as np

from .config import DEFAULT


class DimensionError(ValueError):
    pass


def hermitian(m, tol: float = DEFAULT.herm_construct) -> np.ndarray:
    """Validate and return ``m`` as a complex Hermitian array (stacks allowed)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {m.shape}")
    dev = np.max(np.abs(m - np.swapaxes(m, -1, -2).conj())) if m.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max |M - M^H| = {dev:.3g})")
    return m


def partial_trace_b(m, d_a: int, d_b: int) -> np.ndarray:
    """Trace out the second factor of an operator on ``C^d_a (x) C^d_b``."""
    m = np.asarray(m)
    if m.shape[-2:] != (d_a * d_b, d_a * d_b):
        raise DimensionError(f"operator shape {m.shape[-2:]} does not factor as {d_a}x{d_b}")
    lead = m.shape[:-2]
    return np.trace(m.reshape(*lead, d_a, d_b, d_a, d_b), axis1=-3, axis2=-1)


def partial_trace_a(m, d_a: int, d_b: int) -> np.ndarray:
    m = np.asarray(m)
    if m.shape[-2:] != (d_a * d_b, d_a * d_b):
        raise DimensionError(f"operator shape {m.shape[-2:]} does not factor as {d_a}x{d_b}")
    lead = m.shape[:-2]
    return np.trace(m.reshape(*lead, d_a, d_b, d_a, d_b), axis1=-4, axis2=-2)


def real_embed(h) -> np.ndarray:
    """``H -> [[Re H, -Im H], [Im H, Re H]]``; maps Hermitian d x d to symmetric 2d x 2d."""
    h = np.asarray(h)
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bot = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def real_unembed(s) -> np.ndarray:
    """Inverse of :func:`real_embed` after projecting onto the embedded subspace."""
    s = np.asarray(s)
    d = s.shape[-1] // 2
    a, b = s[..., :d, :d], s[..., :d, d:]
    c, e = s[..., d:, :d], s[..., d:, d:]
    return 0.5 * (a + e) + 0.5j * (c - b)


def min_eig(m) -> float:
    return float(np.linalg.eigvalsh(np.asarray(m)).min())
