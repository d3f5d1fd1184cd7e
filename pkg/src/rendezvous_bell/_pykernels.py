"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same functions with identical results (including
tie-breaking), so either can back :mod:`rendezvous_bell.kernels`.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 14


def lhv_best_response(win):
    """Exact classical optimum of a 0/1 game table ``win[a, b, x, y]``.

    Enumerates every deterministic Bob strategy ``f`` (settings -> outcomes);
    Alice best-responds per setting.  Returns ``(count, bob, alice)`` where
    ``count`` is the number of winning setting pairs and ``bob``/``alice`` are
    0-based outcome arrays.  Among optimal Bob strategies the lexicographically
    least ``(f(0), ..., f(N-1))`` is returned; Alice's per-setting argmax is the
    least outcome.
    """
    win = np.ascontiguousarray(win, dtype=np.int8)
    A, B, N, _ = win.shape
    total = B ** N
    place = B ** np.arange(N - 1, -1, -1, dtype=np.int64)
    # wy[y] has shape (B, A, N): win[:, b, :, y] stacked over b
    wy = [np.ascontiguousarray(win[:, :, :, y].transpose(1, 0, 2), dtype=np.int32) for y in range(N)]
    best, best_idx = -1, 0
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // place[None, :]) % B
        t = np.zeros((idx.size, A, N), dtype=np.int32)
        for y in range(N):
            t += wy[y][digits[:, y]]
        vals = t.max(axis=1).sum(axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_idx = int(vals[k]), int(idx[k])
    bob = (best_idx // place) % B
    t = sum(win[:, bob[y], :, y].astype(np.int64) for y in range(N))  # (A, N)
    alice = t.argmax(axis=0)
    return best, bob.astype(np.int64), alice.astype(np.int64)


def jacobi_eigh(m, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi for one complex Hermitian matrix.

    Returns ``(w, v, sweeps)`` with ``w`` ascending and ``m = v diag(w) v^H``.
    """
    a = np.array(m, dtype=np.complex128)
    d = a.shape[0]
    v = np.eye(d, dtype=np.complex128)
    scale = np.sqrt(np.sum(np.abs(a) ** 2))
    if d == 1 or scale == 0.0:
        return a.diagonal().real.copy(), v, 0
    thresh = (tol * scale) ** 2
    for sweep in range(1, max_sweeps + 1):
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / r
                cph = ph.conjugate()
                # rotation V on (p, q): [[c, s], [-s*conj(ph), c*conj(ph)]]
                vpp, vpq, vqp, vqq = c, s, -s * cph, c * cph
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = colp * vpp + colq * vqp
                a[:, q] = colp * vpq + colq * vqq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = rowp * np.conj(vpp) + rowq * np.conj(vqp)
                a[q, :] = rowp * np.conj(vpq) + rowq * np.conj(vqq)
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = vp * vpp + vq * vqp
                v[:, q] = vp * vpq + vq * vqq
        off = np.sum(np.abs(a[~np.eye(d, dtype=bool)]) ** 2)
        if off <= thresh:
            w = a.diagonal().real
            order = np.argsort(w, kind="stable")
            return w[order].copy(), v[:, order].copy(), sweep
    raise RuntimeError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def step_to_boundary(X, dX):
    """Largest ``t`` with ``X + t dX >= 0`` for stacks (K, d, d); 0 where X is not PD."""
    X = np.asarray(X, dtype=np.complex128)
    dX = np.asarray(dX, dtype=np.complex128)
    out = np.zeros(X.shape[0])
    # Cholesky fails for the whole stack if any member is not PD, so screen first
    ok = np.linalg.eigvalsh(X)[:, 0] > 0
    if not ok.any():
        return out
    try:
        L = np.linalg.cholesky(X[ok])
    except np.linalg.LinAlgError:
        for i in np.flatnonzero(ok):
            out[i] = _single_step(X[i], dX[i])
        return out
    Li = np.linalg.inv(L)
    W = Li @ dX[ok] @ np.conj(np.swapaxes(Li, -1, -2))
    W = 0.5 * (W + np.conj(np.swapaxes(W, -1, -2)))
    lam = np.linalg.eigvalsh(W)[:, 0]
    with np.errstate(divide="ignore"):
        out[ok] = np.where(lam < 0, -1.0 / lam, np.inf)
    return out


def _single_step(x, dx):
    try:
        L = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    Li = np.linalg.inv(L)
    W = Li @ dx @ Li.conj().T
    lam = np.linalg.eigvalsh(0.5 * (W + W.conj().T))[0]
    return -1.0 / lam if lam < 0 else np.inf
