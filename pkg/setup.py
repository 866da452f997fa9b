"""Build script. Compiles the optional stepping kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install. Set MAFLOW_NATIVE=0 to drop -march=native.
"""

import os
import sys

from setuptools import setup, Extension


def make_extensions():
    try:
        from Cython.Build import cythonize
        import numpy
    except ImportError as exc:
        print(f"maflow: skipping compiled kernels ({exc})", file=sys.stderr)
        return []
    flags = ["-O3", "-fno-math-errno"]
    if os.environ.get("MAFLOW_NATIVE", "1") != "0":
        flags.append("-march=native")
    ext = Extension(
        "maflow._core",
        sources=["src/maflow/_core.pyx", "src/maflow/_corekern.c"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=flags,
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


class _BuildExtOptional:
    """Mixin deferring import of build_ext until setup() runs."""


def run_setup(with_ext):
    setup(ext_modules=make_extensions() if with_ext else [])


if __name__ == "__main__":
    try:
        run_setup(True)
    except SystemExit:
        raise
    except Exception as exc:
        print(f"maflow: extension build failed ({exc}); retrying pure-python",
              file=sys.stderr)
        run_setup(False)
