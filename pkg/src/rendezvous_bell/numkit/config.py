"""Solver tolerances, kept in one place."""
from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class Tolerances:
    herm_construct: float = 1e-13
    eig_reconstruct: float = 1e-10
    eig_orthonormal: float = 1e-11
    jacobi_max_sweeps: int = 60
    lp_feas: float = 1e-9
    lp_gap: float = 1e-9
    lp_max_iter: int = 50_000
    lp_refactor_every: int = 40
    lp_stall_bland: int = 50
    sdp_feas: float = 1e-8
    sdp_gap: float = 1e-7
    sdp_max_iter: int = 200
    psd_eig: float = -1e-10
    povm_sum: float = 1e-10
    state_trace: float = 1e-12

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()


class IterLog:
    """Line-delimited JSON iteration log, enabled by ``RDV_SOLVER_LOG=<path|->``."""

    def __init__(self, solver: str, target: str | None = None):
        target = target if target is not None else os.environ.get("RDV_SOLVER_LOG")
        self.solver = solver
        self._fh = None
        if target == "-":
            self._fh = sys.stderr
        elif target:
            self._fh = open(target, "a")

    def __call__(self, **rec) -> None:
        if self._fh is not None:
            rec = {"solver": self.solver, **{k: _plain(v) for k, v in rec.items()}}
            self._fh.write(json.dumps(rec) + "\n")

    def close(self) -> None:
        if self._fh is not None and self._fh is not sys.stderr:
            self._fh.close()
        self._fh = None


def _plain(v):
    try:
        return float(v) if not isinstance(v, (int, str, bool)) else v
    except (TypeError, ValueError):
        return str(v)
