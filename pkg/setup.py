import os
import sys

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


def _openmp_flags():
    if os.environ.get("ECFNORM_NO_OPENMP") or sys.platform == "darwin":
        return [], []
    return ["-fopenmp"], ["-fopenmp"]


def _extensions():
    if cythonize is None:
        # the numpy fallback in ecfnorm._pykernels takes over at import time
        return []
    compile_args, link_args = _openmp_flags()
    ext = Extension(
        "ecfnorm._ckernels",
        ["src/ecfnorm/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"] + compile_args,
        extra_link_args=link_args,
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=_extensions())
