"""Backend selection for the series kernels.

The compiled extension is preferred; the numpy fallback is used when it is
not built.  :func:`use_backend` switches explicitly (tests and benchmarks
run both).
"""

from __future__ import annotations

import importlib
import logging

from . import _kernels_py

log = logging.getLogger(__name__)

try:
    _compiled = importlib.import_module("dnhirota._kernels")
except ImportError:  # extension not built
    _compiled = None
    log.debug("compiled kernels unavailable, using numpy fallback")

_active = _compiled if _compiled is not None else _kernels_py


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


def backend() -> str:
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name: str) -> str:
    """Activate ``"compiled"`` or ``"python"``; returns the previous backend name."""
    global _active
    previous = backend()
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built (pip install -e . to build them)")
        _active = _compiled
    elif name == "python":
        _active = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def mul_csr(a, b, row_ptr, cols, out):
    return _active.mul_csr(a, b, row_ptr, cols, out)


def scatter_scaled(src, dst, factor, a, out):
    return _active.scatter_scaled(src, dst, factor, a, out)
