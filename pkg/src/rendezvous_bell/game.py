"""Compile rendezvous tasks into two-party Bell games and evaluate boxes on them.

Array conventions: every table is indexed ``[a, b, x, y]`` with 0-based
positions, i.e. ``table[a-1, b-1, x-1, y-1]`` holds the entry for outcomes
``a, b`` and starting nodes ``x, y`` in the 1-based labels used everywhere
else (graph nodes, edge labels, outcomes).

An outcome ``a`` encodes a sequence of edge labels ``(a_1, ..., a_T)``
little-endian: ``a - 1 = sum_s (a_s - 1) * R**(s-1)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import Graph, GraphError, from_json

BOX_TOL = 1e-12


class GameError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    graph: Graph
    n_max: int = 1
    edge_meet: bool = False
    same_start: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise GameError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def degree(self) -> int:
        return self.graph.degree

    @property
    def n_outcomes(self) -> int:
        return self.graph.degree ** self.n_max

    @property
    def pair_weight(self) -> Fraction:
        n = self.graph.n
        return Fraction(1, n * n) if self.same_start else Fraction(1, n * (n - 1))

    def describe(self) -> str:
        g = self.graph
        kind = "reflexive" if g.reflexive else "anti-reflexive"
        return (f"{g.name or 'graph'} ({kind}) N_max={self.n_max} "
                f"E={int(self.edge_meet)} S={int(self.same_start)}")

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "graph_name": self.graph.name,
            "n_max": self.n_max,
            "edge_meet": self.edge_meet,
            "same_start": self.same_start,
        }


@dataclass(frozen=True, eq=False)
class BellGame:
    """Rendezvous game: ``coeff = p * win`` with ``win`` a 0/1 table."""

    scenario: Scenario
    win: np.ndarray
    p: Fraction = field(default=Fraction(1))

    @property
    def coeff(self) -> np.ndarray:
        return self.win * float(self.p)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.win.shape

    @property
    def n_outcomes(self) -> int:
        return self.win.shape[0]

    @property
    def n_settings(self) -> int:
        return self.win.shape[2]

    def nonzero(self) -> list[tuple[int, int, int, int]]:
        """1-based ``(a, b, x, y)`` quadruples with nonzero coefficient."""
        return [tuple(int(i) + 1 for i in q) for q in np.argwhere(self.win)]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "n_outcomes": self.n_outcomes,
            "n_settings": self.n_settings,
            "p": str(self.p),
            "p_float": float(self.p),
            "nonzero": self.nonzero(),
        }

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))


def load_game(path) -> BellGame:
    d = json.loads(Path(path).read_text())
    sc = d["scenario"]
    g = from_json(sc["graph"])
    g = Graph(g.n, g.out_edges, g.reflexive, g.directed, sc.get("graph_name", ""))
    scen = Scenario(g, sc["n_max"], sc["edge_meet"], sc["same_start"])
    A, N = d["n_outcomes"], d["n_settings"]
    win = np.zeros((A, A, N, N), dtype=np.int8)
    for a, b, x, y in d["nonzero"]:
        win[a - 1, b - 1, x - 1, y - 1] = 1
    return BellGame(scen, win, Fraction(d["p"]))


@dataclass(frozen=True, eq=False)
class Box:
    """Joint conditional distribution ``P(a,b|x,y)`` stored as ``table[a,b,x,y]``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 4:
            raise GameError("box table must be 4-dimensional (a, b, x, y)")
        object.__setattr__(self, "table", t)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.table.shape

    def normalization_error(self) -> float:
        return float(np.max(np.abs(self.table.sum(axis=(0, 1)) - 1.0)))

    def signaling_error(self) -> float:
        """Largest violation of the two marginal-consistency conditions."""
        pa = self.table.sum(axis=1)  # (a, x, y)
        pb = self.table.sum(axis=0)  # (b, x, y)
        ea = np.max(np.abs(pa - pa[:, :, :1]))
        eb = np.max(np.abs(pb - pb[:, :1, :]))
        return float(max(ea, eb))

    def is_normalized(self, tol: float = BOX_TOL) -> bool:
        return bool(self.table.min() >= -tol and self.normalization_error() <= tol)

    def is_nonsignaling(self, tol: float = 1e-9) -> bool:
        return self.signaling_error() <= tol

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "order": "a,b,x,y row-major",
                "data": self.table.ravel().tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Box":
        return cls(np.asarray(d["data"], dtype=float).reshape(d["dims"]))


@dataclass(frozen=True)
class DeterministicStrategy:
    """Outcome (1-based) chosen at each starting node (1-based)."""

    outcomes: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.outcomes[x - 1]

    @classmethod
    def from_moves(cls, scenario: Scenario, moves: Sequence[Sequence[int]]) -> "DeterministicStrategy":
        """Build from one move sequence (edge labels) per starting node."""
        return cls(tuple(moves_to_outcome(m, scenario.degree) for m in moves))


def outcome_to_moves(a: int, r: int, n_max: int) -> list[int]:
    if not 1 <= a <= r ** n_max:
        raise GameError(f"outcome {a} out of range 1..{r ** n_max}")
    a -= 1
    out = []
    for _ in range(n_max):
        a, d = divmod(a, r)
        out.append(d + 1)
    return out


def moves_to_outcome(moves: Sequence[int], r: int) -> int:
    a = 0
    for s, m in enumerate(moves):
        if not 1 <= m <= r:
            raise GameError(f"move {m} out of range 1..{r}")
        a += (m - 1) * r ** s
    return a + 1


def trajectories(g: Graph, n_max: int) -> np.ndarray:
    """``pos[o, v, s]``: node (1-based) after step ``s+1`` from ``v`` under outcome ``o``."""
    r = g.degree
    nbr = np.asarray(g.out_edges, dtype=np.int64)  # (n, r), 1-based targets
    n_out = r ** n_max
    digits = np.array([outcome_to_moves(o + 1, r, n_max) for o in range(n_out)]) - 1
    pos = np.empty((n_out, g.n, n_max), dtype=np.int64)
    cur = np.broadcast_to(np.arange(1, g.n + 1), (n_out, g.n))
    for s in range(n_max):
        cur = nbr[cur - 1, digits[:, s][:, None]]
        pos[:, :, s] = cur
    return pos


def meeting_step(sc: Scenario) -> np.ndarray:
    """First step (1-based) at which the walkers meet, 0 if never; shape ``(a,b,x,y)``."""
    g = sc.graph
    pos = trajectories(g, sc.n_max)
    start = np.broadcast_to(np.arange(1, g.n + 1)[None, :, None], pos.shape)
    prev = np.concatenate([start[:, :, :1], pos[:, :, :-1]], axis=2)
    pa = pos[:, None, :, None, :]
    pb = pos[None, :, None, :, :]
    met = pa == pb
    if sc.edge_meet:
        met |= (prev[:, None, :, None, :] == pb) & (prev[None, :, None, :, :] == pa)
    first = np.where(met.any(axis=-1), met.argmax(axis=-1) + 1, 0)
    return first.astype(np.int16)


def compile_game(sc: Scenario) -> BellGame:
    """Rendezvous game: ``coeff = p`` iff the walks meet (or swap, with edge meeting)."""
    if not sc.graph.is_regular:
        raise GameError("game compilation requires a regular graph")
    win = (meeting_step(sc) > 0).astype(np.int8)
    if not sc.same_start:
        idx = np.arange(sc.n)
        win[:, :, idx, idx] = 0
    return BellGame(sc, win, sc.pair_weight)


def game_value(game: BellGame, box: Box | np.ndarray) -> float:
    t = box.table if isinstance(box, Box) else np.asarray(box, dtype=float)
    if t.shape != game.shape:
        raise GameError(f"dimension mismatch: box {t.shape} vs game {game.shape}")
    # fixed summation order: integer mask then a single dot product
    return float(np.dot(game.win.ravel().astype(float), t.ravel()) * float(game.p))


def winning_count(game: BellGame, s_a: DeterministicStrategy, s_b: DeterministicStrategy) -> int:
    """Number of winning starting pairs for a deterministic strategy pair."""
    N = game.n_settings
    a = np.asarray(s_a.outcomes) - 1
    b = np.asarray(s_b.outcomes) - 1
    return int(game.win[a[:, None], b[None, :], np.arange(N)[:, None], np.arange(N)[None, :]].sum())


def deterministic_box(s_a: DeterministicStrategy, s_b: DeterministicStrategy,
                      n_outcomes: int) -> Box:
    N = len(s_a.outcomes)
    if len(s_b.outcomes) != N:
        raise GameError("strategies must cover the same settings")
    for o in s_a.outcomes + s_b.outcomes:
        if not 1 <= o <= n_outcomes:
            raise GameError(f"outcome {o} out of range 1..{n_outcomes}")
    pa = np.zeros((n_outcomes, N))
    pb = np.zeros((n_outcomes, N))
    pa[np.asarray(s_a.outcomes) - 1, np.arange(N)] = 1.0
    pb[np.asarray(s_b.outcomes) - 1, np.arange(N)] = 1.0
    return Box(np.einsum("ax,by->abxy", pa, pb))


def quantum_box(qs) -> Box:
    """``P(a,b|x,y) = Tr[rho (M^a_x (x) N^b_y)]``."""
    rho = qs.density.reshape(qs.d_a, qs.d_b, qs.d_a, qs.d_b)
    # rho[i,k,j,l] M[x,a,j,i] N[y,b,l,k]
    t = np.einsum("ikjl,xaji,yblk->abxy", rho, qs.povms_a, qs.povms_b, optimize=True)
    return Box(t.real)


def game_from_spec(graph: Graph, n_max=1, edge_meet=False, same_start=False) -> BellGame:
    return compile_game(Scenario(graph, n_max, edge_meet, same_start))


__all__ = [
    "Scenario", "BellGame", "Box", "DeterministicStrategy", "GameError", "GraphError",
    "outcome_to_moves", "moves_to_outcome", "compile_game", "game_value",
    "deterministic_box", "quantum_box", "meeting_step", "trajectories", "load_game",
    "winning_count", "game_from_spec",
]
