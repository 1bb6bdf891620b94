"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); set DIPRELAX_NO_EXT=1 to skip compilation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DIPRELAX_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "diprelax._kernels",
                    ["src/diprelax/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
