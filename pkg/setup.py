"""Build script for the optional compiled theta core.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile only costs speed. Set DYNELL_NO_EXT=1
to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DYNELL_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dynell._theta_core",
                    ["src/dynell/_theta_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
