"""Build script: compiles the optional kernel extension when a toolchain is present.

The package works without the extension (a numpy fallback is selected at
import time), so any failure while building it downgrades to a pure-Python
install instead of aborting.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            print(f"polyjet: skipping compiled kernels ({exc!r}); "
                  "the numpy fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"polyjet: failed to compile {ext.name} ({exc!r}); "
                  "the numpy fallback will be used")


ext_modules = []
if os.environ.get("POLYJET_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/polyjet/_kernels.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": _OptionalBuildExt})
