"""Build script for the compiled distance kernels.

The package installs fine without a C toolchain or Cython; the distance
module falls back to the pure-Python kernels at import time.
"""

from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "bugmine.distance._ckernels",
                ["src/bugmine/distance/_ckernels.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
