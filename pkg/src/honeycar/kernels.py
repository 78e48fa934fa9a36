"""Backend selection for the numerical kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Set ``HONEYCAR_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

python_backend = _pykernels

try:
    if os.environ.get("HONEYCAR_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if backend is compiled_backend else "python"

BEST_RESPONSE = _pykernels.BEST_RESPONSE
EASIEST_FIRST = _pykernels.EASIEST_FIRST
UNIFORM_RANDOM = _pykernels.UNIFORM_RANDOM


def available_backends():
    """Name -> module for every backend importable in this environment."""
    found = {"python": python_backend}
    if compiled_backend is not None:
        found["cython"] = compiled_backend
    return found


project_simplex = backend.project_simplex
objective = backend.objective
local_descent = backend.local_descent
subgradient_descent = backend.subgradient_descent
grid_search = backend.grid_search
sample_rounds = backend.sample_rounds
