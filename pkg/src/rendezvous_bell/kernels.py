"""Kernel dispatch: the compiled extension when built, else the numpy fallback.

Set ``RDV_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("RDV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"

lhv_best_response = _impl.lhv_best_response
jacobi_eigh = _impl.jacobi_eigh
step_to_boundary = _impl.step_to_boundary
