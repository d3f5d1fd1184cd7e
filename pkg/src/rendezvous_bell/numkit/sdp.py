"""Primal-dual interior-point SDP solver for small dense block problems.

Problem form (maximization)::

    max  sum_j <C_j, X_j>
    s.t. sum_j <A_ij, X_j> = b_i        i = 1..m
         X_j PSD (or X_j >= 0 elementwise for diagonal blocks)

with dual ``min b.y  s.t.  Z_j = sum_i y_i A_ij - C_j  PSD``.

Block sizes follow the SDPA convention: a positive entry ``n`` is a dense
symmetric ``n x n`` block, a negative entry ``-n`` a diagonal (LP) block of
length ``n``.

Complex Hermitian blocks are mapped to real symmetric blocks of twice the
size through ``H -> [[Re H, -Im H], [Im H, Re H]]``.  Since
``<emb(H), emb(X)> = 2 Re Tr(H X)``, data matrices of a complex block are
stored as ``emb(H) / 2`` so that every inner product keeps its complex value;
the returned ``X`` is read back as ``X = S11' + i S21'`` after averaging
``S`` with ``J S J^T`` (``J = [[0, -I], [I, 0]]``), which leaves objective
and constraints unchanged.

The search direction is HKM with Mehrotra's predictor-corrector; the Schur
complement is assembled from the sparse constraint entries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .config import DEFAULT, IterLog, Tolerances
from .linalg import real_embed, real_unembed


class SDPError(RuntimeError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report or {}


class SDPInfeasible(SDPError):
    pass


@dataclass
class SDPProblem:
    """Sparse internal form; build with :meth:`from_dense` or :meth:`from_entries`.

    ``A[j]`` is an ``m x n_j**2`` (dense block, row-major vec) or ``m x n_j``
    (diagonal block) sparse matrix.  ``C[j]`` is an ``n_j x n_j`` array or a
    length-``n_j`` vector.  ``complex_blocks`` records which real blocks are
    embeddings of complex blocks (their size is then ``2 d``).
    """

    blocks: list
    C: list
    A: list
    b: np.ndarray
    complex_blocks: tuple = ()
    offset: float = 0.0

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float).ravel()
        m = self.b.size
        if not (len(self.blocks) == len(self.C) == len(self.A)):
            raise ValueError("blocks, C and A must have one entry per block")
        if max((abs(n) for n in self.blocks if n > 0), default=0) > 512:
            raise ValueError("dense block larger than 512 is out of scope")
        for j, n in enumerate(self.blocks):
            size = n * n if n > 0 else -n
            self.A[j] = sp.csr_matrix(self.A[j])
            if self.A[j].shape != (m, size):
                raise ValueError(f"block {j}: constraint matrix shape {self.A[j].shape}, expected {(m, size)}")
            cj = np.asarray(self.C[j], dtype=float)
            if n > 0:
                cj = cj.reshape(n, n)
                if np.max(np.abs(cj - cj.T), initial=0.0) > 1e-12:
                    raise ValueError(f"block {j}: objective matrix not symmetric")
            else:
                cj = cj.reshape(-n)
            self.C[j] = cj

    @property
    def m(self) -> int:
        return self.b.size

    @classmethod
    def from_dense(cls, blocks, C, constraints, *, hermitian=False):
        """Block-list input: ``constraints = [([A_i1, A_i2, ...], b_i), ...]``.

        With ``hermitian=True`` every dense block is complex Hermitian of the
        given dimension and is embedded as described in the module docstring.
        ``None`` stands for a zero block.
        """
        blocks = list(blocks)
        real_blocks, cx = [], []
        for j, n in enumerate(blocks):
            if hermitian and n > 0:
                real_blocks.append(2 * n)
                cx.append(j)
            else:
                real_blocks.append(n)

        def conv(j, mat):
            n = blocks[j]
            if mat is None:
                return np.zeros((real_blocks[j],) * (2 if n > 0 else 1))
            mat = np.asarray(mat)
            if n < 0:
                return np.asarray(mat, dtype=float).reshape(-n)
            if j in cx:
                return real_embed(mat.reshape(n, n)) / 2.0
            return np.asarray(mat, dtype=float).reshape(n, n)

        Cs = [conv(j, C[j]) for j in range(len(blocks))]
        rows = [[] for _ in blocks]
        b = []
        for mats, rhs in constraints:
            for j in range(len(blocks)):
                rows[j].append(conv(j, mats[j]).ravel())
            b.append(rhs)
        A = [sp.csr_matrix(np.array(r).reshape(len(b), -1)) if b else
             sp.csr_matrix((0, (rb * rb if rb > 0 else -rb))) for r, rb in zip(rows, real_blocks)]
        return cls(real_blocks, Cs, A, np.array(b, dtype=float), tuple(cx))

    @classmethod
    def from_entries(cls, blocks, C, entries, b, offset=0.0):
        """``entries[j] = (rows, cols, vals)``: coordinates into ``A[j]`` (vec index for dense blocks)."""
        m = len(b)
        A = []
        for j, n in enumerate(blocks):
            size = n * n if n > 0 else -n
            r, c, v = entries[j]
            A.append(sp.csr_matrix((v, (r, c)), shape=(m, size)))
        return cls(list(blocks), list(C), A, np.asarray(b, float), (), offset)


@dataclass
class SDPResult:
    value: float
    X: list
    y: np.ndarray
    Z: list
    primal_value: float
    dual_value: float
    gap: float
    rel_gap: float
    primal_infeas: float
    dual_infeas: float
    iterations: int
    history: list = field(default_factory=list)


def _inner(Cs, Xs):
    return float(sum(np.vdot(c, x).real for c, x in zip(Cs, Xs)))


def _apply_A(p, Xs):
    out = np.zeros(p.m)
    for Aj, X in zip(p.A, Xs):
        out += Aj @ X.ravel()
    return out


def _apply_At(p, y):
    res = []
    for n, Aj in zip(p.blocks, p.A):
        v = Aj.T @ y
        res.append(v.reshape(n, n) if n > 0 else v)
    return res


def _coo_cache(p):
    cache = []
    for n, Aj in zip(p.blocks, p.A):
        if n > 0:
            coo = Aj.tocoo()
            rows, cols, vals = coo.row, coo.col, coo.data
            cache.append((rows, cols // n, cols % n, vals))
        else:
            cache.append(None)
    return cache


def _schur(p, Xs, Zinvs, cache):
    """``M_ik = sum_j <A_ij, X_j A_kj Zinv_j>`` (HKM)."""
    m = p.m
    M = np.zeros((m, m))
    for n, Aj, X, Zi, cc in zip(p.blocks, p.A, Xs, Zinvs, cache):
        if n < 0:
            d = X * Zi
            M += (Aj.multiply(d[None, :]) @ Aj.T).toarray()
            continue
        rows, pp, qq, vals = cc
        if vals.size == 0:
            continue
        # T[i] = vec(X A_i Zinv) = sum_e v_e outer(X[p_e], Zinv[q_e])
        T = np.zeros((m, n * n))
        chunk = max(1, 4_000_000 // (n * n))
        for lo in range(0, vals.size, chunk):
            hi = min(lo + chunk, vals.size)
            kr = (vals[lo:hi, None, None] * X[pp[lo:hi], :, None] * Zi[qq[lo:hi], None, :]).reshape(hi - lo, n * n)
            S = sp.csr_matrix((np.ones(hi - lo), (rows[lo:hi], np.arange(hi - lo))), shape=(m, hi - lo))
            T += S @ kr
        M += (Aj @ T.T).T
    return 0.5 * (M + M.T)


def _max_step(X, dX, diag):
    if diag:
        neg = dX < 0
        return float(np.min(-X[neg] / dX[neg])) if np.any(neg) else np.inf
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(Li @ dX @ Li.T).min()
    return -1.0 / lam if lam < 0 else np.inf


def sdp_solve(p: SDPProblem, tol: Tolerances = DEFAULT, *, max_iter: int | None = None) -> SDPResult:
    log = IterLog("sdp")
    try:
        return _sdp_solve(p, tol, max_iter or tol.sdp_max_iter, log)
    finally:
        log.close()


def _sdp_solve(p, tol, max_iter, log):
    m = p.m
    blocks = p.blocks
    diag = [n < 0 for n in blocks]
    sizes = [abs(n) for n in blocks]
    ntot = sum(sizes)
    cache = _coo_cache(p)

    normA = max([abs(Aj).max() if Aj.nnz else 0.0 for Aj in p.A] + [1.0])
    normC = max([np.abs(c).max(initial=0.0) for c in p.C] + [1.0])
    normb = max(np.abs(p.b).max(initial=0.0), 1.0)
    xi = max(10.0, np.sqrt(max(sizes)), normb / normA * 10)
    eta = max(10.0, np.sqrt(max(sizes)), normC)
    Xs = [xi * (np.ones(n) if d else np.eye(n)) for n, d in zip(sizes, diag)]
    Zs = [eta * (np.ones(n) if d else np.eye(n)) for n, d in zip(sizes, diag)]
    y = np.zeros(m)
    history = []
    cnorm = 1.0 + max(np.linalg.norm(c) for c in p.C)
    bnorm = 1.0 + np.linalg.norm(p.b)

    stall = 0
    best = soft = (np.inf,)
    for it in range(max_iter + 1):
        AtY = _apply_At(p, y)
        rp = p.b - _apply_A(p, Xs)
        Rd = [c - a + z for c, a, z in zip(p.C, AtY, Zs)]
        pobj = _inner(p.C, Xs)
        dobj = float(p.b @ y)
        mu = sum(np.vdot(x, z).real for x, z in zip(Xs, Zs)) / ntot
        pinf = np.linalg.norm(rp) / bnorm
        dinf = max(np.linalg.norm(r) for r in Rd) / cnorm
        gap = abs(pobj - dobj)
        rel = gap / (1.0 + abs(pobj) + abs(dobj))
        history.append((it, pobj, dobj, pinf, dinf, rel))
        log(it=it, pobj=pobj, dobj=dobj, pinf=pinf, dinf=dinf, rel_gap=rel, mu=mu)
        if rel <= tol.sdp_gap * 0.1 and pinf <= tol.sdp_feas * 0.1 and dinf <= tol.sdp_feas * 0.1:
            break
        score = max(rel / tol.sdp_gap, pinf / tol.sdp_feas, dinf / tol.sdp_feas)
        if score < best[0]:
            best = (score, it, [x.copy() for x in Xs], y.copy(), [z.copy() for z in Zs],
                    (pobj, dobj, gap, rel, pinf, dinf))
        # same, with the primal residual allowed to lag by a factor 100
        soft_score = max(rel / tol.sdp_gap, pinf / (100 * tol.sdp_feas), dinf / tol.sdp_feas)
        if soft_score < soft[0]:
            soft = (soft_score, it, [x.copy() for x in Xs], y.copy(), [z.copy() for z in Zs],
                    (pobj, dobj, gap, rel, pinf, dinf))
        # once mu is negligible further steps only accumulate rounding error
        tiny = mu <= 1e-12 * (1.0 + abs(pobj) + abs(dobj))
        # a stalled or exhausted run is still accepted at the nominal tolerances
        if (it == max_iter or stall >= 3 or tiny or score > 100 * best[0]) and best[0] <= 1.0:
            _, it, Xs, y, Zs, (pobj, dobj, gap, rel, pinf, dinf) = best
            break
        if it == max_iter or stall >= 10 or (tiny and stall >= 3):
            # the dual objective stays a valid bound when only the primal residual lags
            if soft[0] <= 1.0:
                _, it, Xs, y, Zs, (pobj, dobj, gap, rel, pinf, dinf) = soft
                break
            raise SDPError(f"no convergence after {it} iterations (rel_gap={rel:.2e}, "
                           f"pinf={pinf:.2e}, dinf={dinf:.2e})",
                           {"rel_gap": rel, "pinf": pinf, "dinf": dinf, "iterations": it})
        if np.linalg.norm(y) > 1e12 and dinf < 1e-6:
            raise SDPInfeasible("dual iterates diverge; primal appears infeasible",
                                {"y_norm": float(np.linalg.norm(y)), "iterations": it})
        if max(np.max(np.abs(x)) for x in Xs) > 1e12 and pinf < 1e-6:
            raise SDPInfeasible("primal iterates diverge; dual appears infeasible",
                                {"iterations": it})

        Zinvs = []
        for z, d in zip(Zs, diag):
            if d:
                Zinvs.append(1.0 / z)
            else:
                zi = np.linalg.inv(z)
                Zinvs.append(0.5 * (zi + zi.T))
        M = _schur(p, Xs, Zinvs, cache)
        M[np.diag_indices(m)] += 1e-14 * max(1.0, np.abs(M).max())
        try:
            fac = cho_factor(M, lower=True, check_finite=False)
            solve = lambda r: cho_solve(fac, r, check_finite=False)
        except LinAlgError:
            Mp = np.linalg.pinv(M)
            solve = lambda r: Mp @ r

        def direction(sigma, corr):
            # rhs = A(sigma mu Zinv + X Rd Zinv - corr) - b
            G = []
            for x, zi, rd, d, cr in zip(Xs, Zinvs, Rd, diag, corr):
                if d:
                    g = sigma * mu * zi + x * rd * zi
                else:
                    g = sigma * mu * zi + x @ rd @ zi
                if cr is not None:
                    g = g - cr
                G.append(g)
            rhs = _apply_A(p, G) - p.b
            dy = solve(rhs)
            AtdY = _apply_At(p, dy)
            dZ = [a - rd for a, rd in zip(AtdY, Rd)]
            dX = []
            for x, zi, dz, d, cr in zip(Xs, Zinvs, dZ, diag, corr):
                if d:
                    dx = sigma * mu * zi - x - x * dz * zi
                else:
                    dx = sigma * mu * zi - x - x @ dz @ zi
                    dx = 0.5 * (dx + dx.T)
                if cr is not None:
                    dx = dx - (cr if d else 0.5 * (cr + cr.T))
                dX.append(dx)
            return dy, dX, dZ

        def steps(dX, dZ, gamma):
            ap = min([1.0] + [gamma * _max_step(x, dx, d) for x, dx, d in zip(Xs, dX, diag)])
            ad = min([1.0] + [gamma * _max_step(z, dz, d) for z, dz, d in zip(Zs, dZ, diag)])
            return ap, ad

        none = [None] * len(blocks)
        dy, dX, dZ = direction(0.0, none)
        ap, ad = steps(dX, dZ, 1.0)
        mu_aff = sum(np.vdot(x + ap * dx, z + ad * dz).real
                     for x, dx, z, dz in zip(Xs, dX, Zs, dZ)) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        corr = []
        for dx, dz, zi, d in zip(dX, dZ, Zinvs, diag):
            corr.append(dx * dz * zi if d else dx @ dz @ zi)
        dy, dX, dZ = direction(sigma, corr)
        gamma = 0.9 if it < 3 else 0.98
        ap, ad = steps(dX, dZ, gamma)
        Xs = [x + ap * dx for x, dx in zip(Xs, dX)]
        y = y + ad * dy
        stall = stall + 1 if max(ap, ad) < 1e-6 or mu <= 1e-12 * (1.0 + abs(pobj) + abs(dobj)) else 0
        Zs = [z + ad * dz for z, dz in zip(Zs, dZ)]

    Xout = []
    for j, x in enumerate(Xs):
        Xout.append(real_unembed(x) if j in p.complex_blocks else x)
    Zout = []
    for j, z in enumerate(Zs):
        Zout.append(real_unembed(z) if j in p.complex_blocks else z)
    return SDPResult(
        value=pobj + p.offset, X=Xout, y=y, Z=Zout, primal_value=pobj + p.offset,
        dual_value=dobj + p.offset, gap=gap, rel_gap=rel, primal_infeas=pinf, dual_infeas=dinf,
        iterations=it, history=history,
    )
