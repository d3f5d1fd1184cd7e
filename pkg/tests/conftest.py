import os
import sys
from fractions import Fraction

import numpy as np
import pytest

from rendezvous_bell.game import Scenario, compile_game
from rendezvous_bell.graph import from_catalog

sys.path.insert(0, os.path.dirname(__file__))


def make_game(name, reflexive=False, n_max=1, edge_meet=False, same_start=False):
    return compile_game(Scenario(from_catalog(name, reflexive), n_max, edge_meet, same_start))


@pytest.fixture
def cycle4_refl():
    """Reflexive 4-cycle, one step, no edge meeting, distinct starts."""
    return make_game("cycle-4", True, 1, False, False)


def explicit_ns_box():
    """The explicit non-signaling box for the reflexive 4-cycle (E=0, S=0), stored as printed."""
    P = np.zeros((3, 3, 4, 4))

    def put(a, b, x, y, v):
        P[a - 1, b - 1, x - 1, y - 1] = v

    for x in range(1, 5):
        P[:, :, x - 1, x - 1] = 1 / 9
    for x, y in [(2, 1), (4, 1), (1, 2), (4, 3), (1, 4), (3, 4)]:
        for a in range(1, 4):
            put(a, a, x, y, 1 / 3)
    for (a, b) in [(2, 1), (1, 2), (3, 3)]:
        put(a, b, 3, 1, 1 / 3)
        put(a, b, 1, 3, 1 / 3)
    for (a, b) in [(1, 1), (3, 2), (2, 3)]:
        put(a, b, 2, 4, 1 / 3)
        put(a, b, 4, 2, 1 / 3)
    for (a, b) in [(3, 1), (1, 2), (2, 3)]:
        put(a, b, 3, 2, 1 / 3)
    for (a, b) in [(2, 1), (3, 2), (1, 3)]:
        put(a, b, 2, 3, 1 / 3)
    return P


def literal_win_table(adj, n_max, E, S):
    """Direct transliteration of the quadruple loop, 1-based, with exact weights."""
    N = len(adj)
    R = len(adj[0])
    p = Fraction(1, N * N) if S else Fraction(1, N * (N - 1))
    A = R ** n_max

    def digits(a):
        a -= 1
        out = []
        for _ in range(n_max):
            a, d = divmod(a, R)
            out.append(d + 1)
        return out

    B = {}
    for a in range(1, A + 1):
        da = digits(a)
        for b in range(1, A + 1):
            db = digits(b)
            for x in range(1, N + 1):
                Y = range(1, N + 1) if S else [y for y in range(1, N + 1) if y != x]
                for y in Y:
                    pA, pB = x, y
                    for s in range(n_max):
                        nA = adj[pA - 1][da[s] - 1]
                        nB = adj[pB - 1][db[s] - 1]
                        if nA == nB or (E and pA == nB and pB == nA):
                            B[(a, b, x, y)] = p
                        pA, pB = nA, nB
    return B


def _verdicts(config) -> dict:
    return config.__dict__.setdefault("rdv_acceptance", {})


@pytest.fixture
def verdict(request):
    """``verdict(key, ok, detail)`` records one acceptance line for the terminal summary."""
    def record(key, ok, detail=""):
        _verdicts(request.config)[key] = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = _verdicts(config)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
