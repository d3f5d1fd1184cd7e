"""See-saw lower bounds on the quantum value.

Every restart alternates three exact maximizations: the state (top
eigenvector of the Bell operator), Alice's POVMs and Bob's POVMs (one small
SDP per setting).  A step is only accepted when it raises the value, so each
restart ascends monotonically.  All restarts advance together as one numpy
batch; a restart leaves the batch once a full round improves it by less than
``tol``.

Restart 0 is always the optimal deterministic strategy embedded as diagonal
projectors on ``|00>``; it is a fixed point worth exactly the classical
optimum, so the result never falls below the LHV bound.  Restarts ``1..n``
start from random projective measurements seeded by ``(seed, index)``.
"""
from __future__ import annotations

import logging
import time

import numpy as np

from ..game import BellGame, game_value, quantum_box
from ..numkit.povm import POVMSolverError, solve_povms
from ..quantum import QuantumStrategy, classical_embedding
from .lhv import lhv_bound
from .report import BoundKind, BoundReport

log = logging.getLogger(__name__)

MAX_ROUNDS = 500
TOL = 1e-9
# a step must beat the current value by this much to replace it
ACCEPT = 1e-13


def default_dim(n_outcomes: int) -> int:
    return min(n_outcomes, 4)


def random_povms(rng, settings: int, outcomes: int, d: int) -> np.ndarray:
    """Projective measurements from Haar-like orthonormal frames, split into near-equal ranks.

    Returns shape (settings, outcomes, d, d).  Ranks differ by at most one;
    which outcomes receive the larger ranks is itself drawn at random.
    """
    out = np.zeros((settings, outcomes, d, d), dtype=np.complex128)
    for x in range(settings):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(g)
        q = q * (np.diag(r) / np.abs(np.diag(r)))  # fix the phase ambiguity of QR
        sizes = np.full(outcomes, d // outcomes)
        sizes[rng.permutation(outcomes)[: d % outcomes]] += 1
        start = 0
        for a, s in enumerate(sizes):
            cols = q[:, start:start + s]
            out[x, a] = cols @ cols.conj().T
            start += s
    return out


def _restart_rng(seed: int, index: int):
    return np.random.default_rng([int(seed), int(index)])


class _Batch:
    """Strategies of all restarts, stacked along axis 0."""

    def __init__(self, coeff, psi, MA, MB, d_a, d_b):
        self.c = coeff
        self.psi, self.MA, self.MB = psi, MA, MB
        self.d_a, self.d_b = d_a, d_b

    def bell_operator(self, idx):
        K = np.einsum("abxy,rybij->rxaij", self.c, self.MB[idx], optimize=True)
        G = np.einsum("rxaij,rxakl->rikjl", self.MA[idx], K, optimize=True)
        D = self.d_a * self.d_b
        G = G.reshape(-1, D, D)
        return 0.5 * (G + np.conj(np.swapaxes(G, -1, -2)))

    def rewards_alice(self, idx):
        Psi = self.psi[idx].reshape(-1, self.d_a, self.d_b)
        # Tr_B[(1 x N) |psi><psi|] = Psi N^T Psi^dagger
        W = np.einsum("rik,rybjk,rlj->rybil", Psi, self.MB[idx], np.conj(Psi), optimize=True)
        return np.einsum("abxy,rybil->rxail", self.c, W, optimize=True)

    def rewards_bob(self, idx):
        Psi = self.psi[idx].reshape(-1, self.d_a, self.d_b)
        # Tr_A[(M x 1) |psi><psi|] = Psi^T M^T conj(Psi)
        W = np.einsum("rki,rxamk,rmj->rxaij", Psi, self.MA[idx], np.conj(Psi), optimize=True)
        return np.einsum("abxy,rxaij->rybij", self.c, W, optimize=True)


class _Warm:
    """Dual iterates of the previous POVM step, one per (restart, setting)."""

    def __init__(self, n, X, d):
        self.Y = np.zeros((n, X, d, d), dtype=np.complex128)
        self.t = np.zeros((n, X))
        self.have = np.zeros(n, bool)

    def get(self, idx):
        if not self.have[idx].all():
            return None
        X, d = self.Y.shape[1], self.Y.shape[2]
        return self.Y[idx].reshape(-1, d, d), self.t[idx].reshape(-1)

    def put(self, idx, res):
        if res is None or res.Y is None:
            return
        X, d = self.Y.shape[1], self.Y.shape[2]
        self.Y[idx] = res.Y.reshape(-1, X, d, d)
        self.t[idx] = res.t.reshape(-1, X)
        self.have[idx] = True


def _povm_step(R, gap_tol, warm=None, idx=None):
    """Solve the POVM step for a stack (r, X, A, d, d); returns (M, value per restart, ok mask)."""
    r, X, A, d, _ = R.shape
    try:
        res = solve_povms(R.reshape(r * X, A, d, d), gap_tol=gap_tol,
                          warm=warm.get(idx) if warm is not None else None)
        M = res.M.reshape(R.shape)
        val = res.value.reshape(r, X).sum(axis=1)
        ok = np.isfinite(val)
        if warm is not None:
            warm.put(idx, res)
        return M, val, ok
    except (POVMSolverError, np.linalg.LinAlgError):
        # isolate the failing restart(s)
        M = np.zeros_like(R)
        val = np.full(r, -np.inf)
        ok = np.zeros(r, bool)
        for i in range(r):
            try:
                res = solve_povms(R[i], gap_tol=gap_tol)
            except (POVMSolverError, np.linalg.LinAlgError):
                continue
            M[i] = res.M
            val[i] = res.value.sum()
            ok[i] = np.isfinite(val[i])
        return M, val, ok


def seesaw(game: BellGame, d_a: int | None = None, d_b: int | None = None, restarts: int = 50,
           seed: int = 0, *, max_rounds: int = MAX_ROUNDS, tol: float = TOL,
           povm_gap: float = 1e-10) -> BoundReport:
    t0 = time.perf_counter()
    A, B, N, M_ = game.shape
    d_a = d_a or default_dim(A)
    d_b = d_b or default_dim(B)
    if d_a < 1 or d_b < 1:
        raise ValueError("dimensions must be positive")
    c = game.coeff.astype(float)
    n = restarts + 1

    lhv = lhv_bound(game)
    s_a, s_b = lhv.certificate
    seed_qs = classical_embedding(s_a, s_b, game.n_outcomes, d_a, d_b)
    psi = np.zeros((n, d_a * d_b), dtype=np.complex128)
    MA = np.zeros((n, N, A, d_a, d_a), dtype=np.complex128)
    MB = np.zeros((n, M_, B, d_b, d_b), dtype=np.complex128)
    psi[0], MA[0], MB[0] = seed_qs.state, seed_qs.povms_a, seed_qs.povms_b
    for i in range(1, n):
        rng = _restart_rng(seed, i)
        MA[i] = random_povms(rng, N, A, d_a)
        MB[i] = random_povms(rng, M_, B, d_b)
    batch = _Batch(c, psi, MA, MB, d_a, d_b)

    value = np.full(n, -np.inf)
    value[0] = float(lhv.value)
    trace = [[value[0]]] + [[] for _ in range(1, n)]
    status = ["running"] * n
    rounds = np.zeros(n, dtype=int)
    active = np.ones(n, bool)

    def accept(idx, new_val, ok, apply):
        better = ok & (new_val > value[idx] + ACCEPT)
        sel = idx[better]
        apply(better)
        value[sel] = new_val[better]
        for i, f in zip(idx, ok):
            if not f and status[i] == "running":
                status[i] = "failed"
                log.warning("see-saw restart %d: POVM step failed; restart dropped", i)
                active[i] = False

    def state_step(idx):
        G = batch.bell_operator(idx)
        w, v = np.linalg.eigh(G)
        new_val, new_psi = w[:, -1], v[:, :, -1]
        ok = np.isfinite(new_val)

        def apply(better):
            batch.psi[idx[better]] = new_psi[better]
        accept(idx, new_val, ok, apply)

    warm_a = _Warm(n, N, d_a)
    warm_b = _Warm(n, M_, d_b)

    def alice_step(idx):
        Mn, new_val, ok = _povm_step(batch.rewards_alice(idx), povm_gap, warm_a, idx)

        def apply(better):
            batch.MA[idx[better]] = Mn[better]
        accept(idx, new_val, ok, apply)

    def bob_step(idx):
        Mn, new_val, ok = _povm_step(batch.rewards_bob(idx), povm_gap, warm_b, idx)

        def apply(better):
            batch.MB[idx[better]] = Mn[better]
        accept(idx, new_val, ok, apply)

    for rnd in range(1, max_rounds + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        state_step(idx)
        idx = idx[active[idx]]
        alice_step(idx)
        idx = idx[active[idx]]
        bob_step(idx)
        idx = idx[active[idx]]
        rounds[idx] = rnd
        for i in idx:
            trace[i].append(float(value[i]))
        prev = np.array([trace[i][-2] if len(trace[i]) > 1 else -np.inf for i in idx])
        done = value[idx] - prev < tol
        for i in idx[done]:
            status[i] = "converged"
        active[idx[done]] = False
    for i in np.flatnonzero(active):
        status[i] = "max_rounds"

    usable = [i for i in range(n) if status[i] != "failed" and np.isfinite(value[i])]
    if not usable:
        usable = [0]
    best = max(usable, key=lambda i: (value[i], -i))
    qs = QuantumStrategy(d_a, d_b, batch.psi[best].copy(), batch.MA[best].copy(), batch.MB[best].copy())
    exact = game_value(game, quantum_box(qs))
    diag = {
        "dims": [d_a, d_b], "restarts": restarts, "seed": seed, "best_restart": best,
        "lhv_seed_value": float(lhv.value), "batch_value": float(value[best]),
        "restart_values": [float(v) for v in value], "restart_status": status,
        "restart_rounds": rounds.tolist(), "trace": trace,
        "converged": status[best] == "converged",
        "schmidt": qs.schmidt_coefficients().tolist(),
        "seconds": time.perf_counter() - t0,
    }
    return BoundReport(BoundKind.SEESAW, float(exact), qs, tol, diag)
