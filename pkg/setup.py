"""Build script: compiles the butterfly kernel when a toolchain is present.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are demoted to a warning.
"""

import warnings

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "cubespectral._kernels._butterfly",
                ["src/cubespectral/_kernels/_butterfly.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - toolchain-dependent
    warnings.warn(f"building without compiled kernels: {exc}")
    extensions = []

setup(ext_modules=extensions)
