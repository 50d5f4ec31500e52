"""Build script: compiles the optional C kernel core.

The package works without the extension (a NumPy fallback is selected at
import time), so any failure here degrades to a pure-Python install rather
than aborting.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "catscale._kernels._cykernels",
                ["src/catscale/_kernels/_cykernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"catscale: skipping C extension build ({exc}); "
          "pure-Python kernels will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
