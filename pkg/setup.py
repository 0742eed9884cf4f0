import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or without a working C
# compiler) the package falls back to the numpy implementation at import time.
try:
    from Cython.Build import cythonize

    HAVE_CYTHON = True
except ImportError:
    HAVE_CYTHON = False

ext_modules = []
if HAVE_CYTHON:
    extra_compile_args = ["-O3"]
    extra_link_args = []
    if os.environ.get("FPLIMITS_NO_OPENMP", "0") != "1":
        extra_compile_args.append("-fopenmp")
        extra_link_args.append("-fopenmp")
    ext_modules = cythonize(
        [
            Extension(
                "fplimits._pairsum",
                ["src/fplimits/_pairsum.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=extra_compile_args,
                extra_link_args=extra_link_args,
                libraries=["m"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
