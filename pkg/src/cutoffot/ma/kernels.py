"""Kernel backend selection.

The compiled extension is used when importable; setting the environment
variable CUTOFFOT_PURE_PYTHON=1 forces the NumPy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("CUTOFFOT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "compiled"

second_differences = _impl.second_differences
interior_residual = _impl.interior_residual
boundary_residual = _impl.boundary_residual
lower_hull = _impl.lower_hull


def backend_module(name):
    """Return the kernel module for ``name`` in {"python", "compiled"}."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels as mod
        return mod
    raise ValueError(f"unknown backend {name!r}")
