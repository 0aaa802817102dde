"""Build shim for the optional compiled integer kernels.

The package is pure Python apart from ``cuboid_complex._exactcore._speedups``,
which is generated from a Cython source.  The extension is marked optional:
if no compiler (or no Cython) is available the install still succeeds and the
package falls back to the pure-Python kernels at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "cuboid_complex._exactcore._speedups",
                ["src/cuboid_complex/_exactcore/_speedups.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
