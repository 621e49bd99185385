"""Build script for the optional compiled stencil kernels.

The package is pure Python plus one Cython extension. If the extension cannot
be built (no compiler, no Cython), installation proceeds and the numpy
fallback backend is used at import time.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/masections/_stencil.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
        ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"masections: skipping compiled kernels ({exc})\n")
    ext_modules = []

setup(ext_modules=ext_modules)
