"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
fallback is behaviorally identical (same results, same random-bit stream).
Set MODIAGEN_BACKEND=python or =cython to force one side.
"""
import os

from . import _kernels_py

_requested = os.environ.get("MODIAGEN_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _kernels_cy as kernels
        backend_name = "cython"
    except ImportError:
        kernels = _kernels_py
        backend_name = "python"
elif _requested in ("cython", "cy", "c", "compiled"):
    from . import _kernels_cy as kernels
    backend_name = "cython"
elif _requested in ("python", "py", "pure"):
    kernels = _kernels_py
    backend_name = "python"
else:
    raise ImportError(
        f"MODIAGEN_BACKEND={_requested!r} not recognized "
        "(use auto, python or cython)")


def get_kernels(name=None):
    """Kernel module by name: None/'auto' for the selected default."""
    if name in (None, "auto"):
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels_cy
        return _kernels_cy
    raise ValueError(f"unknown backend {name!r}")
