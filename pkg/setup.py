import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "capwhitham._kernels",
                ["src/capwhitham/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    # The package still works without the compiled core; capwhitham.backend
    # falls back to the numpy implementation at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
