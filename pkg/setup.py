"""Build script for the optional compiled scoring kernel.

The package works without the extension (a numpy fallback is selected at
import time); set PUBCHAIN_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PUBCHAIN_SKIP_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pubchain.kernels._core",
                ["src/pubchain/kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
