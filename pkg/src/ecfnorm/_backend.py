"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``ECFNORM_PURE_PYTHON=1`` to force the numpy kernels.
"""

import importlib
import os

from . import _pykernels


def load(name):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("ecfnorm._ckernels")
    raise ValueError(f"unknown backend {name!r}")


def available():
    names = ["python"]
    try:
        load("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("ECFNORM_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        kernels = load("cython")
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"
