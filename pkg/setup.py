"""Build script for the compiled kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "notchcast._kernels",
                ["src/notchcast/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # -march=native: the extension is always built from source on
                # the machine that runs it, so target its SIMD width (the
                # pure-numpy fallback covers machines without a compiler)
                extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
