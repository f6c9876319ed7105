"""Build script: compiles the optional simplex kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure to cythonize or compile is demoted to a
warning and the build proceeds pure-Python.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "bpmpbench.solver._simplex_cy",
        ["src/bpmpbench/solver/_simplex_cy.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off: the compiled kernel must produce bit-identical
        # floating point results to the numpy fallback (no fused multiply-add).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    ext_modules = cythonize([ext], language_level=3)
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        f"warning: building without compiled simplex kernel ({exc!r}); "
        "the pure-Python backend will be used\n"
    )

setup(ext_modules=ext_modules)
