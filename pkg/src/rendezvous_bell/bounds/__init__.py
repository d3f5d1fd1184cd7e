"""Optima of a compiled game over the four resource sets, plus noise robustness."""
from ..quantum import QuantumStrategy
from .lhv import ScenarioTooLarge, lhv_bound
from .noise import CriticalNoise, NoAdvantage, noise_value, nu_crit
from .npa import ml_bound
from .ns import SolverFailure, ns_bound
from .report import BoundKind, BoundReport
from .seesaw import seesaw

__all__ = [
    "BoundKind", "BoundReport", "CriticalNoise", "NoAdvantage", "QuantumStrategy",
    "ScenarioTooLarge", "SolverFailure", "lhv_bound", "ml_bound", "noise_value",
    "ns_bound", "nu_crit", "seesaw",
]
