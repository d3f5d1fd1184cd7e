"""Bell-game bounds for rendezvous on graphs.

A rendezvous task (graph, step limit, edge meeting, same-start flag) is
compiled into a two-party Bell game; its value is then bounded over
classical, quantum (see-saw), NPA level-1 and non-signaling boxes.
"""
__version__ = "0.1.0"

from .graph import Graph, GraphError, build_cycle, edge_target, from_adjacency_list, from_catalog, walk
from .game import (BellGame, Box, DeterministicStrategy, GameError, Scenario, compile_game,
                   deterministic_box, game_value, outcome_to_moves, quantum_box)
from .quantum import QuantumStrategy
from .bounds import (BoundKind, BoundReport, lhv_bound, ml_bound, noise_value, ns_bound, nu_crit,
                     seesaw)
from .mcverify import SimReport, simulate

__all__ = [
    "Graph", "GraphError", "build_cycle", "edge_target", "from_adjacency_list", "from_catalog", "walk",
    "BellGame", "Box", "DeterministicStrategy", "GameError", "Scenario", "compile_game",
    "deterministic_box", "game_value", "outcome_to_moves", "quantum_box", "QuantumStrategy",
    "BoundKind", "BoundReport", "lhv_bound", "ml_bound", "noise_value", "ns_bound", "nu_crit",
    "seesaw", "SimReport", "simulate", "__version__",
]
