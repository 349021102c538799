"""Build script for the optional compiled moat-growth kernel.

The package is fully functional without the extension: graphguide.pcst
falls back to the pure-Python kernel at import time. Building with
Cython available produces graphguide.pcst._fastcore, which the solver
picks up automatically.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/graphguide/pcst/_fastcore.pyx",
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
