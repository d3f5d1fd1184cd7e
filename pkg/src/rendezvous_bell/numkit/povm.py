"""Batched solver for the POVM step.

For each instance ``k`` it solves::

    max  sum_a Re Tr(R[k,a] M[a])   s.t.  sum_a M[a] = I,  M[a] >= 0

through its dual ``min Tr Y  s.t.  Y >= R[k,a]`` with a log-barrier path
following method: Newton steps on ``Tr Y - t sum_a log det(Y - R_a)``,
shrinking ``t`` once the iterate is centered.  On the central path
``M_a = t (Y - R_a)^-1`` is primal feasible and the duality gap is exactly
``t A d``.  The returned POVMs are renormalized by the congruence
``(sum_a M_a)^(-1/2)``, so they are exactly feasible; ``Tr Y`` stays a valid
upper bound because ``Y`` is kept strictly dual feasible throughout.

Instances are processed together in stacked numpy calls and drop out of the
batch as soon as they reach their gap target.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


class POVMSolverError(RuntimeError):
    pass


@dataclass
class POVMResult:
    M: np.ndarray          # (K, A, d, d)
    value: np.ndarray      # (K,) objective of the returned M
    dual: np.ndarray       # (K,) Tr Y, an upper bound on the optimum
    newton_steps: int
    converged: np.ndarray  # (K,) bool
    Y: np.ndarray = None   # (K, d, d) dual iterate, reusable as a warm start
    t: np.ndarray = None   # (K,) final barrier weight

    @property
    def gap(self) -> np.ndarray:
        return self.dual - self.value


def _herm(x):
    return 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))


def _max_step(X, dX):
    """Largest t with X + t dX >= 0, batched over leading axes (0 where X is not PD)."""
    lead = X.shape[:-2]
    d = X.shape[-1]
    dX = np.broadcast_to(dX, X.shape)
    return kernels.step_to_boundary(X.reshape(-1, d, d), dX.reshape(-1, d, d)).reshape(lead)


def _sum_kron(P, Q):
    """sum_a kron(P[k,a], Q[k,a]) for stacks of d x d matrices, shape (K, d*d, d*d)."""
    K, A, d, _ = P.shape
    out = np.swapaxes(P.reshape(K, A, d * d), 1, 2) @ Q.reshape(K, A, d * d)
    return out.reshape(K, d, d, d, d).transpose(0, 1, 3, 2, 4).reshape(K, d * d, d * d)


def normalize_povms(M):
    """Congruence by ``(sum_a M_a)^(-1/2)``: keeps every element PSD and makes the sum exactly I."""
    w, V = np.linalg.eigh(_herm(M.sum(axis=-3)))
    T = (V / np.sqrt(w)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    return _herm(T[..., None, :, :] @ M @ T[..., None, :, :])


def solve_povms(R, *, gap_tol=1e-10, shrink: float = 20.0, max_newton: int = 400,
                warm: tuple | None = None) -> POVMResult:
    """Optimal POVMs for a stack of reward operators ``R`` of shape (K, A, d, d).

    ``gap_tol`` (scalar or per-instance array) is relative: instance ``k``
    stops once its central-path gap is below ``gap_tol * (1 + |Tr Y|)``.
    ``warm = (Y, t)`` from an earlier result on nearby rewards starts the path
    from that dual point, shifted just enough to be strictly feasible.
    """
    R = _herm(np.asarray(R, dtype=np.complex128))
    K, A, d, _ = R.shape
    eye = np.eye(d)
    if A == 1:
        M = np.broadcast_to(eye, (K, 1, d, d)).astype(np.complex128)
        v = np.einsum("kaij,kaji->k", R, M).real
        return POVMResult(M, v, v.copy(), 0, np.ones(K, bool))
    gap_tol = np.array(np.broadcast_to(np.asarray(gap_tol, dtype=float), (K,)))

    lmax = np.linalg.eigvalsh(R)[..., -1].max(axis=1)
    scale = 1.0 + np.abs(R).max(axis=(1, 2, 3))
    Y = ((lmax + scale)[:, None, None] * eye).astype(np.complex128)
    t = scale / A
    if warm is not None:
        Yw, tw = warm
        Yw = _herm(np.asarray(Yw, dtype=np.complex128))
        # distance from dual feasibility for the new rewards
        viol = np.linalg.eigvalsh(R - Yw[:, None])[..., -1].max(axis=1)
        t_w = np.clip(10.0 * (np.maximum(viol, 0.0) + np.asarray(tw, float)), 1e-300, t)
        use = np.isfinite(viol) & np.isfinite(t_w)
        shift = np.maximum(viol, 0.0) + t_w
        Y[use] = Yw[use] + (shift[use])[:, None, None] * eye
        t[use] = t_w[use]
    if kernels.compiled_backend is not None:
        Y, t, nsteps, status = kernels.compiled_backend.povm_barrier(R, gap_tol, Y, t, shrink, max_newton)
        return _finish(R, Y, t, int(nsteps.max(initial=0)), status.astype(bool))
    active = np.ones(K, bool)
    conv = np.zeros(K, bool)
    steps = 0
    while active.any() and steps < max_newton:
        steps += 1
        idx = np.flatnonzero(active)
        k = idx.size
        Ya, ta = Y[idx], t[idx]
        S = Ya[:, None] - R[idx]
        Si = _herm(np.linalg.inv(S))
        grad = eye - ta[:, None, None] * Si.sum(axis=1)
        H = ta[:, None, None] * _sum_kron(Si, np.swapaxes(Si, -1, -2))
        try:
            dY = np.linalg.solve(H, -grad.reshape(k, d * d, 1)).reshape(k, d, d)
        except np.linalg.LinAlgError as exc:
            raise POVMSolverError("singular Newton system in POVM step") from exc
        dY = _herm(dY)
        dec = np.maximum(-np.einsum("kij,kji->k", grad, dY).real / ta, 0.0)
        tmax = _max_step(S, dY[:, None]).min(axis=1)
        damped = np.where(dec > 0.25, 1.0 / (1.0 + np.sqrt(dec)), 1.0)
        step = np.minimum(damped, 0.95 * tmax)
        Y[idx] = _herm(Ya + step[:, None, None] * dY)
        centered = dec < 1e-2
        trY = np.trace(Y[idx], axis1=1, axis2=2).real
        done = centered & (ta * A * d <= gap_tol[idx] * (1.0 + np.abs(trY)))
        stuck = (step < 1e-12) & ~done
        conv[idx[done]] = True
        active[idx[done | stuck]] = False
        go = centered & ~done
        t[idx[go]] = ta[go] / shrink

    return _finish(R, Y, t, steps, conv)


def _finish(R, Y, t, steps, conv):
    M = normalize_povms(t[:, None, None, None] * _herm(np.linalg.inv(Y[:, None] - R)))
    value = np.einsum("kaij,kaji->k", R, M).real
    dual = np.trace(Y, axis1=1, axis2=2).real
    return POVMResult(M, value, dual, steps, conv, Y, t)
