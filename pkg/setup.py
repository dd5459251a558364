"""Build script: compiles the optional dilation kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a missing Cython or a failed compile only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "grayspace._kernels._native",
                ["src/grayspace/_kernels/_native.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
