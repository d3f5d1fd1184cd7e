"""White-noise robustness of a quantum strategy.

The state is replaced by ``nu |psi><psi| + (1 - nu) I / (d_A d_B)`` with the
measurements unchanged, so the value is affine in ``nu``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..game import BellGame, game_value, quantum_box
from ..quantum import QuantumStrategy, StrategyError


class NoAdvantage(ValueError):
    """The strategy does not beat the classical value, so no finite critical noise exists."""


@dataclass(frozen=True)
class CriticalNoise:
    nu: float
    v0: float
    v1: float
    lhv: float
    degenerate: bool  # v0 already reaches the classical value
    schmidt: tuple

    def to_dict(self):
        return {"nu_crit": self.nu, "v0": self.v0, "v1": self.v1, "lhv": self.lhv,
                "degenerate": self.degenerate, "schmidt": list(self.schmidt)}


def noisy_state(qs: QuantumStrategy, nu: float) -> np.ndarray:
    if not qs.is_pure:
        raise StrategyError("noise model needs a pure state")
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"noise parameter {nu!r} outside [0, 1]")
    D = qs.d_a * qs.d_b
    return nu * qs.density + (1.0 - nu) * np.eye(D) / D


def noise_value(qs: QuantumStrategy, game: BellGame, nu: float) -> float:
    return game_value(game, quantum_box(qs.with_state(noisy_state(qs, nu))))


def nu_crit(qs: QuantumStrategy, game: BellGame, lhv: float) -> CriticalNoise:
    """Visibility at which the noisy strategy drops to the classical value ``lhv``."""
    v0 = noise_value(qs, game, 0.0)
    v1 = noise_value(qs, game, 1.0)
    lhv = float(lhv)
    if v1 <= lhv:
        raise NoAdvantage(f"no finite critical noise: value {v1:.10g} does not exceed {lhv:.10g}")
    degenerate = v0 >= lhv
    nu = 0.0 if degenerate else (lhv - v0) / (v1 - v0)
    return CriticalNoise(nu, v0, v1, lhv, degenerate, tuple(qs.schmidt_coefficients().tolist()))
