"""Build script: compiles the optional C extension for the hot kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile only costs speed.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "medtextkit._kernels._speedups",
                ["src/medtextkit/_kernels/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
