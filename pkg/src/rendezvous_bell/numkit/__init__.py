"""Dense numerical kernels: Hermitian eigensolver, partial traces, simplex LP, SDP and POVM solvers."""
from .config import DEFAULT, Tolerances
from .eig import hermitian_eig, is_psd, top_eigvec
from .linalg import hermitian, partial_trace_a, partial_trace_b
from .lp import LPError, LPInfeasible, LPProblem, LPResult, LPUnbounded, lp_solve
from .povm import POVMResult, POVMSolverError, solve_povms
from .sdp import SDPError, SDPInfeasible, SDPProblem, SDPResult, sdp_solve

__all__ = [
    "DEFAULT", "Tolerances", "hermitian_eig", "is_psd", "top_eigvec", "hermitian",
    "partial_trace_a", "partial_trace_b", "LPError", "LPInfeasible", "LPProblem", "LPResult",
    "LPUnbounded", "lp_solve", "POVMResult", "POVMSolverError", "solve_povms", "SDPError",
    "SDPInfeasible", "SDPProblem", "SDPResult", "sdp_solve",
]
