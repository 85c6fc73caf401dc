"""Builds the optional Cython speedup module.

The package is fully functional without the compiled extension; the kernels
fall back to pure Python at import time if the build is skipped or fails.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "modiagen._kernels_cy",
                ["src/modiagen/_kernels_cy.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
