"""Monte-Carlo cross-check of game values.

Each trial draws a starting pair ``(x, y)`` uniformly over the admissible
pairs (the diagonal is excluded unless same starts are allowed), draws the
outcome pair ``(a, b)`` from the box row ``P(., .|x, y)``, decodes both
outcomes into edge-label sequences, walks the graph and records the first
step at which the parties meet.  Sampling the joint table directly is a
verification device for any box (including non-signaling ones), not a
protocol the agents could run.

Random numbers come from numpy's Philox counter-based generator.  Trials are
cut into fixed-size chunks and chunk ``i`` draws from the ``i``-th child of
``SeedSequence(seed)``, so counts do not depend on how chunks are spread
over workers.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .game import Box, GameError, Scenario, outcome_to_moves
from .graph import walk

CHUNK = 1 << 18
NORM_TOL = 1e-9
RNG_NAME = "numpy.random.Philox (SeedSequence spawn per chunk)"


class SimulationError(ValueError):
    pass


@dataclass
class SimReport:
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    confidence: float = 0.95
    scenario: str = ""
    rng: str = RNG_NAME
    chunk: int = CHUNK

    @property
    def interval(self) -> tuple[float, float]:
        return self.ci_low, self.ci_high

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2))
        return path


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise SimulationError("trials must be >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    z2n = z * z / trials
    centre = (p + z2n / 2) / (1 + z2n)
    half = z * np.sqrt(p * (1 - p) / trials + z2n / (4 * trials)) / (1 + z2n)
    return max(0.0, float(centre - half)), min(1.0, float(centre + half))


def meeting_table(sc: Scenario) -> np.ndarray:
    """First meeting step (0 = never) for every ``(a, b, x, y)``, 0-based indices.

    Built by walking the graph node by node, independently of the game compiler.
    """
    g = sc.graph
    R, T, N = g.degree, sc.n_max, g.n
    A = R ** T
    paths = np.empty((A, N, T + 1), dtype=np.int64)
    for a in range(A):
        moves = outcome_to_moves(a + 1, R, T)
        for x in range(N):
            paths[a, x, 0] = x + 1
            paths[a, x, 1:] = walk(g, x + 1, moves)
    out = np.zeros((A, A, N, N), dtype=np.int16)
    for s in range(T, 0, -1):  # descending, so the earliest meeting wins
        pa = paths[:, None, :, None, s]
        pb = paths[None, :, None, :, s]
        met = pa == pb
        if sc.edge_meet:
            met |= (paths[:, None, :, None, s - 1] == pb) & (paths[None, :, None, :, s - 1] == pa)
        out[met] = s
    return out


def _check(sc: Scenario, box: Box, trials) -> np.ndarray:
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise SimulationError(f"trials must be a positive integer, got {trials!r}")
    t = box.table if isinstance(box, Box) else np.asarray(box, dtype=float)
    A, N = sc.n_outcomes, sc.n
    if t.shape != (A, A, N, N):
        raise SimulationError(f"box dims {t.shape} do not match scenario {(A, A, N, N)}")
    err = max(float(np.max(np.abs(t.sum(axis=(0, 1)) - 1.0))), float(-t.min()))
    if not np.isfinite(err) or err > NORM_TOL:
        raise SimulationError(f"box normalization violated by {err:.3e}; refusing to sample")
    return t


def _pairs(sc: Scenario) -> np.ndarray:
    N = sc.n
    xs, ys = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    keep = np.ones((N, N), bool) if sc.same_start else ~np.eye(N, dtype=bool)
    return np.stack([xs[keep], ys[keep]], axis=1)


def _chunk(ss, n, pairs, cdf, meet, A):
    rng = np.random.Generator(np.random.Philox(ss))
    pick = rng.integers(0, len(pairs), size=n)
    u = rng.random(n)
    x, y = pairs[pick, 0], pairs[pick, 1]
    ab = np.empty(n, dtype=np.int64)
    for p in np.unique(pick):
        sel = pick == p
        row = cdf[:, :, pairs[p, 0], pairs[p, 1]].ravel()
        ab[sel] = np.minimum(np.searchsorted(row, u[sel], side="right"), row.size - 1)
    a, b = np.divmod(ab, A)
    return x, y, a, b, meet[a, b, x, y]


def _jobs(sc: Scenario, box: Box, trials: int, seed: int):
    t = _check(sc, box, trials)
    trials = int(trials)
    A = sc.n_outcomes
    meet = meeting_table(sc)
    pairs = _pairs(sc)
    # cumulative over the flattened (a, b) index for every setting pair
    cdf = np.cumsum(np.clip(t, 0.0, None).reshape(A * A, sc.n, sc.n), axis=0)
    cdf /= cdf[-1]
    cdf = cdf.reshape(A, A, sc.n, sc.n)
    sizes = [CHUNK] * (trials // CHUNK) + ([trials % CHUNK] if trials % CHUNK else [])
    seqs = np.random.SeedSequence(int(seed)).spawn(len(sizes))
    return [(ss, n, pairs, cdf, meet, A) for ss, n in zip(seqs, sizes)]


def _map(fn, jobs, workers):
    workers = workers or int(os.environ.get("RDV_THREADS", "1"))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def sample(sc: Scenario, box: Box, trials: int, seed: int = 0, workers: int | None = None):
    """All per-trial draws as 0-based arrays ``(x, y, a, b, met_at_step)``."""
    parts = _map(lambda j: _chunk(*j), _jobs(sc, box, trials, seed), workers)
    return tuple(np.concatenate(col) for col in zip(*parts))


def simulate(sc: Scenario, box: Box, trials: int, seed: int = 0, *, confidence: float = 0.95,
             trace_path=None, workers: int | None = None) -> SimReport:
    try:
        if trace_path is not None:
            x, y, a, b, step = sample(sc, box, trials, seed, workers)
            write_trace(trace_path, x, y, a, b, step)
            succ = int(np.count_nonzero(step))
        else:
            # count per chunk so memory stays bounded by the chunk size
            jobs = _jobs(sc, box, trials, seed)
            succ = sum(_map(lambda j: int(np.count_nonzero(_chunk(*j)[4])), jobs, workers))
    except GameError as e:
        raise SimulationError(str(e)) from e
    lo, hi = wilson_interval(succ, int(trials), confidence)
    return SimReport(int(trials), succ, succ / int(trials), lo, hi, int(seed), confidence, sc.describe())


def write_trace(path, x, y, a, b, step) -> Path:
    """Per-trial CSV with 1-based settings and outcomes; ``met_at_step`` is 0 when they never meet."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "a", "b", "met_at_step"])
        w.writerows(zip((x + 1).tolist(), (y + 1).tolist(), (a + 1).tolist(), (b + 1).tolist(),
                        step.tolist()))
    return path


__all__ = ["SimReport", "SimulationError", "simulate", "sample", "meeting_table",
           "wilson_interval", "write_trace"]
