"""Hermitian eigensolver (cyclic Jacobi) behind the kernel dispatch."""
from __future__ import annotations

import numpy as np

from .. import kernels
from .config import DEFAULT
from .linalg import hermitian


def hermitian_eig(m, *, max_sweeps: int = DEFAULT.jacobi_max_sweeps):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Accepts a single matrix or a stack ``(..., d, d)``.
    """
    m = hermitian(m)
    if m.shape[-1] == 0:
        raise ValueError("empty matrix")
    if m.ndim == 2:
        w, v, _ = kernels.jacobi_eigh(m, 1e-15, max_sweeps)
        return w, v
    lead = m.shape[:-2]
    d = m.shape[-1]
    flat = m.reshape(-1, d, d)
    ws = np.empty((flat.shape[0], d))
    vs = np.empty_like(flat)
    for i, mi in enumerate(flat):
        ws[i], vs[i], _ = kernels.jacobi_eigh(mi, 1e-15, max_sweeps)
    return ws.reshape(*lead, d), vs.reshape(*lead, d, d)


def is_psd(m, tol: float = DEFAULT.psd_eig) -> bool:
    w, _ = hermitian_eig(m)
    return bool(np.all(w >= tol))


def top_eigvec(m) -> tuple[float, np.ndarray]:
    w, v = hermitian_eig(m)
    return float(w[-1]), v[:, -1]
