"""Kernel backend selection.

The compiled extension ``apfol._ckernels`` is used when it was built and
importable; otherwise (or with ``APFOL_PURE_PYTHON=1``) the pure-Python
implementation is used.  Both expose ``closure``, ``project`` and
``project_states`` with identical results.
"""

from __future__ import annotations

import importlib
import os

from . import _kernels_py


def load(name: str | None = None):
    """Return a kernel module: ``"python"``, ``"cython"`` or the default."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("apfol._ckernels")
    if os.environ.get("APFOL_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py
    try:
        return importlib.import_module("apfol._ckernels")
    except ImportError:
        return _kernels_py


def available() -> list[str]:
    names = ["python"]
    try:
        importlib.import_module("apfol._ckernels")
        names.append("cython")
    except ImportError:
        pass
    return names


backend = load()
BACKEND = backend.BACKEND
