"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``OMCSPEC_PURE_PYTHON=1`` to force the numpy path.
"""
from __future__ import annotations

import importlib
import os

from . import _kernels_py


def load(name: str | None = None):
    """Return the kernel module ``"cython"`` or ``"python"`` (default: best available)."""
    if name == "python":
        return _kernels_py
    if name in (None, "cython"):
        try:
            return importlib.import_module("omcspec._kernels")
        except ImportError:
            if name == "cython":
                raise
            return _kernels_py
    raise ValueError(f"unknown kernel implementation {name!r}")


_impl = load("python" if os.environ.get("OMCSPEC_PURE_PYTHON") else None)
IMPLEMENTATION = "python" if _impl is _kernels_py else "cython"
closed_counts = _impl.closed_counts
quad_counts = _impl.quad_counts
