import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fbmcrw._kernels",
                ["src/fbmcrw/_kernels.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython: install pure-Python only, the NumPy backend takes over.
    ext_modules = []

setup(ext_modules=ext_modules)
