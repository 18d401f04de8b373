"""Build hook for the optional Cython kernels.

The extension is optional: when the compiler or Cython is unavailable the
package installs anyway and ``guessbench.kernels`` falls back to the
pure-Python implementations.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "guessbench._ckernels",
                ["src/guessbench/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
