"""Dense revised simplex for ``max c.x  s.t.  A x = b,  x_j >= 0 (masked)``.

Two phases with artificial variables, explicit basis inverse refreshed by
rank-one updates and periodic refactorization.  Pricing is Dantzig's rule;
after a run of degenerate pivots it switches to Bland's rule until the
objective moves again, which rules out cycling.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr

from .config import DEFAULT, IterLog, Tolerances


class LPError(RuntimeError):
    pass


class LPInfeasible(LPError):
    """``farkas`` satisfies ``A.T @ farkas <= 0`` (on nonneg columns, ``== 0`` on free) and ``b @ farkas > 0``."""

    def __init__(self, msg, farkas):
        super().__init__(msg)
        self.farkas = farkas


class LPUnbounded(LPError):
    """``ray`` satisfies ``A @ ray == 0``, ``ray >= 0`` on nonneg columns and ``c @ ray > 0``."""

    def __init__(self, msg, ray):
        super().__init__(msg)
        self.ray = ray


@dataclass
class LPProblem:
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    nonneg: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_eq = np.asarray(self.A_eq, dtype=float).reshape(-1, n)
        self.b_eq = np.asarray(self.b_eq, dtype=float).ravel()
        if self.b_eq.size != self.A_eq.shape[0]:
            raise ValueError("b_eq length does not match A_eq rows")
        if self.nonneg is None:
            self.nonneg = np.ones(n, dtype=bool)
        self.nonneg = np.asarray(self.nonneg, dtype=bool).ravel()
        if self.nonneg.size != n:
            raise ValueError("nonneg mask length does not match c")

    @classmethod
    def from_inequalities(cls, c, A_ub, b_ub, A_eq=None, b_eq=None, nonneg=None):
        """Add one slack per ``A_ub x <= b_ub`` row; slacks are appended after ``x``."""
        c = np.asarray(c, dtype=float).ravel()
        n = c.size
        A_ub = np.asarray(A_ub, dtype=float).reshape(-1, n)
        k = A_ub.shape[0]
        A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
        b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
        A = np.block([[A_ub, np.eye(k)], [A_eq, np.zeros((A_eq.shape[0], k))]])
        b = np.concatenate([np.asarray(b_ub, dtype=float).ravel(), b_eq])
        mask = np.ones(n, dtype=bool) if nonneg is None else np.asarray(nonneg, dtype=bool)
        return cls(np.concatenate([c, np.zeros(k)]), A, b, np.concatenate([mask, np.ones(k, bool)]))


@dataclass
class LPResult:
    value: float
    x: np.ndarray
    y: np.ndarray
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    dropped_rows: list = field(default_factory=list)


def _independent_rows(A, tol=1e-10):
    if A.shape[0] == 0:
        return np.arange(0)
    _, r, piv = qr(A.T, mode="economic", pivoting=True)
    d = np.abs(np.diag(r))
    if d.size == 0 or d[0] == 0:
        return np.arange(0)
    rank = int(np.sum(d > tol * d[0]))
    return np.sort(piv[:rank])


class _Simplex:
    def __init__(self, A, b, tol: Tolerances, log: IterLog):
        self.A, self.b = A, b
        self.m, self.n = A.shape
        self.tol = tol
        self.log = log
        self.iterations = 0

    def refactor(self):
        self.Binv = np.linalg.inv(self.A[:, self.basis])
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-13] = 0.0
        self.since_refactor = 0

    def run(self, c, allowed, phase):
        tol = self.tol
        stall, bland = 0, False
        obj = c[self.basis] @ self.xB
        while True:
            if self.iterations >= tol.lp_max_iter:
                raise LPError(f"simplex iteration limit {tol.lp_max_iter} reached in phase {phase}")
            y = c[self.basis] @ self.Binv
            d = c - y @ self.A
            d[~allowed] = 0.0
            d[self.basis] = 0.0
            cand = np.flatnonzero(d > tol.lp_gap)
            if cand.size == 0:
                return y
            j = int(cand[0]) if bland else int(cand[np.argmax(d[cand])])
            u = self.Binv @ self.A[:, j]
            pos = np.flatnonzero(u > 1e-11)
            if pos.size == 0:
                ray = np.zeros(self.n)
                ray[j] = 1.0
                ray[self.basis] = -u
                raise LPUnbounded("objective is unbounded", ray)
            ratios = self.xB[pos] / u[pos]
            rmin = ratios.min()
            ties = pos[ratios <= rmin + 1e-12]
            if bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(u[ties])])
            theta = self.xB[r] / u[r]
            # rank-one update of the basis inverse
            piv = self.Binv[r] / u[r]
            self.Binv -= np.outer(u, piv)
            self.Binv[r] = piv
            self.xB -= theta * u
            self.xB[r] = theta
            self.basis[r] = j
            self.iterations += 1
            self.since_refactor += 1
            if self.since_refactor >= tol.lp_refactor_every:
                self.refactor()
            new_obj = c[self.basis] @ self.xB
            if new_obj > obj + 1e-12:
                stall, bland = 0, False
            else:
                stall += 1
                if stall >= tol.lp_stall_bland:
                    bland = True
            obj = new_obj
            self.log(phase=phase, it=self.iterations, obj=obj, enter=j, leave_row=r, bland=bland)


def lp_solve(p: LPProblem, tol: Tolerances = DEFAULT) -> LPResult:
    """Maximize ``p.c @ x`` subject to ``p.A_eq @ x == p.b_eq`` and the sign mask."""
    log = IterLog("lp")
    try:
        return _lp_solve(p, tol, log)
    finally:
        log.close()


def _lp_solve(p, tol, log):
    n0 = p.c.size
    free = np.flatnonzero(~p.nonneg)
    # free columns split as x = x+ - x-
    A = np.hstack([p.A_eq, -p.A_eq[:, free]])
    c = np.concatenate([p.c, -p.c[free]])
    b = p.b_eq.copy()
    m_all = A.shape[0]
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    keep = _independent_rows(A)
    dropped = sorted(set(range(m_all)) - set(keep.tolist()))
    Ak, bk = A[keep], b[keep]
    m, n = Ak.shape

    def unsplit(z):
        x = z[:n0].copy()
        x[free] -= z[n0:]
        return x

    def full_dual(yk):
        y = np.zeros(m_all)
        y[keep] = yk
        return y * sign

    if m == 0:
        if np.any(np.abs(b) > tol.lp_feas):
            farkas = b * sign
            raise LPInfeasible("constraint rows are inconsistent", farkas)
        if np.any(c > 0):
            ray = np.zeros(n)
            ray[int(np.argmax(c))] = 1.0
            raise LPUnbounded("objective is unbounded", unsplit(ray))
        return LPResult(0.0, np.zeros(n0), np.zeros(m_all), 0.0, 0.0, 0.0, 0, dropped)

    # phase I on [A | I] with artificials
    Aph = np.hstack([Ak, np.eye(m)])
    sx = _Simplex(Aph, bk, tol, log)
    sx.basis = np.arange(n, n + m)
    sx.refactor()
    c1 = np.concatenate([np.zeros(n), -np.ones(m)])
    allowed = np.ones(n + m, dtype=bool)
    y1 = sx.run(c1, allowed, 1)
    infeas = -float(c1[sx.basis] @ sx.xB)
    if infeas > tol.lp_feas:
        farkas = full_dual(-y1)
        raise LPInfeasible(f"infeasible (phase-I residual {infeas:.3g})", farkas)

    # pivot artificials out of the basis where possible
    for r in range(m):
        if sx.basis[r] >= n:
            row = sx.Binv[r] @ Ak
            row[sx.basis[sx.basis < n]] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-9:
                sx.basis[r] = j
                sx.refactor()

    c2 = np.concatenate([c, np.zeros(m)])
    allowed = np.concatenate([np.ones(n, bool), np.zeros(m, bool)])
    try:
        sx.run(c2, allowed, 2)
    except LPUnbounded as e:
        # drop artificial columns and merge split free columns
        raise LPUnbounded(str(e), unsplit(e.ray[:n])) from None
    sx.refactor()
    z = np.zeros(n + m)
    z[sx.basis] = np.maximum(sx.xB, 0.0)
    yk = c2[sx.basis] @ sx.Binv
    x_split = z[:n]
    x = unsplit(x_split)

    value = float(p.c @ x)
    y = full_dual(yk)
    pres = float(np.max(np.abs(p.A_eq @ x - p.b_eq))) if p.b_eq.size else 0.0
    red = p.c - p.A_eq.T @ y
    dres = float(max(np.max(red[p.nonneg], initial=0.0), np.max(np.abs(red[~p.nonneg]), initial=0.0)))
    gap = abs(value - float(p.b_eq @ y))
    if pres > 1e3 * tol.lp_feas and dropped:
        r = p.b_eq - p.A_eq @ np.linalg.lstsq(p.A_eq, p.b_eq, rcond=None)[0]
        raise LPInfeasible("dependent rows are inconsistent", r)
    return LPResult(value, x, y, gap, pres, dres, sx.iterations, dropped)
