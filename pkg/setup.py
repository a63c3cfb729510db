"""Build script for the optional compiled kernel core.

The package works without the extension; ``qlr._kernels`` falls back to a
numpy implementation when ``_core`` cannot be imported.
"""
import os

import numpy as np
from setuptools import setup

ext_modules = []
if not os.environ.get("QLR_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "qlr._kernels._core",
                    ["src/qlr/_kernels/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
