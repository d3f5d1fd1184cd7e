"""Non-signaling optimum as a linear program."""
from __future__ import annotations

import time

import numpy as np

from ..game import BellGame, Box, game_value
from ..numkit.config import DEFAULT
from ..numkit.lp import LPError, LPProblem, lp_solve
from .report import BoundKind, BoundReport


class SolverFailure(RuntimeError):
    pass


def ns_constraints(A: int, B: int, N: int, M: int | None = None):
    """Equality system for non-signaling boxes over variables ``P[a,b,x,y]`` (row-major).

    Normalization for every setting pair, plus marginal consistency with the
    redundant last outcome dropped, which leaves a full-row-rank system.
    """
    M = N if M is None else M
    idx = np.arange(A * B * N * M).reshape(A, B, N, M)
    nv = idx.size
    rows = []
    for x in range(N):
        for y in range(M):
            r = np.zeros(nv)
            r[idx[:, :, x, y].ravel()] = 1.0
            rows.append(r)
    n_norm = len(rows)
    for x in range(N):
        for a in range(A - 1):
            for y in range(1, M):
                r = np.zeros(nv)
                r[idx[a, :, x, y]] = 1.0
                r[idx[a, :, x, 0]] -= 1.0
                rows.append(r)
    for y in range(M):
        for b in range(B - 1):
            for x in range(1, N):
                r = np.zeros(nv)
                r[idx[:, b, x, y]] = 1.0
                r[idx[:, b, 0, y]] -= 1.0
                rows.append(r)
    A_eq = np.array(rows)
    b_eq = np.zeros(len(rows))
    b_eq[:n_norm] = 1.0
    return A_eq, b_eq


def ns_bound(game: BellGame, tol=DEFAULT) -> BoundReport:
    t0 = time.perf_counter()
    A, B, N, M = game.shape
    A_eq, b_eq = ns_constraints(A, B, N, M)
    prob = LPProblem(game.coeff.ravel(), A_eq, b_eq)
    try:
        res = lp_solve(prob, tol)
    except LPError as e:
        raise SolverFailure(f"NS linear program failed: {e}") from e
    box = Box(res.x.reshape(A, B, N, M))
    diag = {
        "iterations": res.iterations, "duality_gap": res.gap,
        "primal_residual": res.primal_residual, "dual_residual": res.dual_residual,
        "signaling_error": box.signaling_error(), "normalization_error": box.normalization_error(),
        "certificate_value": game_value(game, box), "seconds": time.perf_counter() - t0,
    }
    if res.gap > tol.lp_gap or res.primal_residual > 1e-8 or res.dual_residual > 1e-8:
        raise SolverFailure(f"NS LP residuals too large: {diag}")
    return BoundReport(BoundKind.NS, res.value, box, tol.lp_gap, diag)
