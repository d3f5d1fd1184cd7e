"""Moment-matrix (NPA) upper bounds on the quantum value.

Operators are the projectors ``A(x,a)``, ``B(y,b)`` with the last outcome of
every setting omitted (it is fixed by normalization).  The moment matrix is
indexed by a list of words; entries whose words reduce to the same monomial
are tied together, entries reducing to zero vanish, and the identity entry
is 1.  Probabilities are read off the moments; those involving an omitted
outcome are rebuilt by normalization, and every probability is constrained
to be nonnegative.

Levels:
  ``NPA1``     words {1, A(x,a), B(y,b)}
  ``NPA1+AB``  adds the products A(x,a) B(y,b)
"""
from __future__ import annotations

import time
from itertools import product

import numpy as np

from ..game import BellGame, Box, game_value
from ..numkit.config import DEFAULT
from ..numkit.sdp import SDPError, SDPProblem, sdp_solve
from .ns import SolverFailure
from .report import BoundKind, BoundReport

LEVELS = ("NPA1", "NPA1+AB")
MAX_MOMENT_DIM = 128

ZERO = None


def _reduce(ops):
    """Reduce a same-party word of (setting, outcome) projectors."""
    out = []
    for op in ops:
        if out and out[-1][0] == op[0]:
            if out[-1][1] == op[1]:
                continue  # idempotent
            return ZERO  # orthogonal outcomes of one setting
        out.append(op)
    return tuple(out)


def canonical(word):
    """Canonical monomial of a word of ('A'|'B', setting, outcome) ops, or None if zero."""
    a = _reduce([(s, o) for p, s, o in word if p == "A"])
    b = _reduce([(s, o) for p, s, o in word if p == "B"])
    if a is ZERO or b is ZERO:
        return ZERO
    # real moment matrix: <w> = <w^dagger>
    return min((a, b), (a[::-1], b[::-1]))


def moment_words(A, B, N, M, level="NPA1"):
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; choose from {LEVELS}")
    ops_a = [("A", x, a) for x in range(N) for a in range(A - 1)]
    ops_b = [("B", y, b) for y in range(M) for b in range(B - 1)]
    words = [()] + [(o,) for o in ops_a] + [(o,) for o in ops_b]
    if level == "NPA1+AB":
        words += [(oa, ob) for oa in ops_a for ob in ops_b]
    return words


def build_npa(game: BellGame, level="NPA1"):
    """SDP data plus the bookkeeping needed to read probabilities off the solution."""
    A, B, N, M = game.shape
    words = moment_words(A, B, N, M, level)
    n = len(words)
    if n > MAX_MOMENT_DIM:
        raise ValueError(f"moment matrix dimension {n} exceeds {MAX_MOMENT_DIM}")

    rep = {}   # monomial -> representative (i, j)
    ent_r, ent_c, ent_v, rhs = [], [], [], []
    row = 0

    def add_entry(i, j, v):
        if i == j:
            ent_r.append(row), ent_c.append(i * n + j), ent_v.append(v)
        else:
            ent_r.extend((row, row)), ent_c.extend((i * n + j, j * n + i)), ent_v.extend((v / 2, v / 2))

    for i in range(n):
        wi_dag = tuple(reversed(words[i]))
        for j in range(i, n):
            key = canonical(wi_dag + words[j])
            if key is ZERO:
                add_entry(i, j, 1.0)
                rhs.append(0.0)
                row += 1
            elif key == ((), ()):
                add_entry(i, j, 1.0)
                rhs.append(1.0)
                row += 1
                rep.setdefault(key, (i, j))
            elif key in rep:
                add_entry(i, j, 1.0)
                pi, pj = rep[key]
                add_entry(pi, pj, -1.0)
                rhs.append(0.0)
                row += 1
            else:
                rep[key] = (i, j)

    def moment(key):
        return rep[key]

    # P(a,b|x,y) as const + sum_k coef_k * Gamma[entry_k]
    prob_terms = np.empty((A, B, N, M), dtype=object)
    for a, b, x, y in product(range(A), range(B), range(N), range(M)):
        ia = [a] if a < A - 1 else list(range(A - 1))
        ib = [b] if b < B - 1 else list(range(B - 1))
        sa = 1.0 if a < A - 1 else -1.0
        sb = 1.0 if b < B - 1 else -1.0
        const = 1.0 if (a == A - 1 and b == B - 1) else 0.0
        terms = []
        # expand (1{a last} + sa*sum A)(1{b last} + sb*sum B)
        if a == A - 1:
            for bb in ib:
                terms.append((moment(((), ((y, bb),))), sb))
        if b == B - 1:
            for aa in ia:
                terms.append((moment((((x, aa),), ())), sa))
        for aa in ia:
            for bb in ib:
                terms.append((moment((((x, aa),), ((y, bb),))), sa * sb))
        prob_terms[a, b, x, y] = (const, terms)

    n_pos = A * B * N * M
    pos_r, pos_c, pos_v = [], [], []
    offset = 0.0
    C = np.zeros((n, n))
    coeff = game.coeff
    for k, (a, b, x, y) in enumerate(product(range(A), range(B), range(N), range(M))):
        const, terms = prob_terms[a, b, x, y]
        for (i, j), v in terms:
            add_entry(i, j, v)
        pos_r.append(row), pos_c.append(k), pos_v.append(-1.0)
        rhs.append(-const)
        row += 1
        c = coeff[a, b, x, y]
        if c:
            offset += c * const
            for (i, j), v in terms:
                if i == j:
                    C[i, i] += c * v
                else:
                    C[i, j] += c * v / 2
                    C[j, i] += c * v / 2

    prob = SDPProblem.from_entries(
        [n, -n_pos], [C, np.zeros(n_pos)],
        [(np.array(ent_r), np.array(ent_c), np.array(ent_v)),
         (np.array(pos_r), np.array(pos_c), np.array(pos_v))],
        np.array(rhs), offset=offset,
    )
    return prob, words, prob_terms


def box_from_moments(gamma, prob_terms) -> Box:
    shape = prob_terms.shape
    t = np.empty(shape)
    for idx in np.ndindex(shape):
        const, terms = prob_terms[idx]
        t[idx] = const + sum(v * gamma[i, j] for (i, j), v in terms)
    return Box(t)


def moment_constraint_residual(gamma, words) -> float:
    """Largest violation of the tie/zero/unit structure of a moment matrix."""
    n = len(words)
    rep, worst = {}, 0.0
    for i in range(n):
        wi_dag = tuple(reversed(words[i]))
        for j in range(i, n):
            key = canonical(wi_dag + words[j])
            if key is ZERO:
                worst = max(worst, abs(gamma[i, j]))
            elif key == ((), ()):
                worst = max(worst, abs(gamma[i, j] - 1.0))
            elif key in rep:
                worst = max(worst, abs(gamma[i, j] - gamma[rep[key]]))
            else:
                rep[key] = (i, j)
    return float(max(worst, np.max(np.abs(gamma - gamma.T))))


def ml_bound(game: BellGame, level: str = "NPA1", tol=DEFAULT) -> BoundReport:
    t0 = time.perf_counter()
    prob, words, terms = build_npa(game, level)
    try:
        res = sdp_solve(prob, tol)
    except SDPError as e:
        raise SolverFailure(f"NPA SDP failed: {e} {e.report}") from e
    gamma = res.X[0]
    box = box_from_moments(gamma, terms)
    diag = {
        "level": level, "moment_dim": len(words), "constraints": prob.m,
        "iterations": res.iterations, "duality_gap": res.gap, "rel_gap": res.rel_gap,
        "primal_infeas": res.primal_infeas, "dual_infeas": res.dual_infeas,
        "dual_value": res.dual_value, "min_eig": float(np.linalg.eigvalsh(gamma).min()),
        "structure_residual": moment_constraint_residual(gamma, words),
        "box_value": game_value(game, box), "seconds": time.perf_counter() - t0,
    }
    # the dual objective is the certified upper bound
    return BoundReport(BoundKind.ML, res.dual_value, gamma, max(res.gap, tol.sdp_gap), diag)
