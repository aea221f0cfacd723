"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a numpy reference
implementation is selected at import time), so any build failure here
degrades to a pure-Python install instead of aborting.
"""

import sys

from setuptools import setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "gmtcover._kernels._fast",
                ["src/gmtcover/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # noqa: BLE001 - fall back to pure python install
    sys.stderr.write(f"gmtcover: building without compiled kernels ({exc})\n")
    extensions = []

setup(ext_modules=extensions)
