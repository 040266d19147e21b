"""Build script: compiles the optional Cython routing kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so a missing compiler or missing Cython must never fail
the install.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-Python kernel on any failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            warnings.warn(f"skipping compiled kernel, using pure-Python fallback: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name}, using pure-Python fallback: {exc}")


# -ffp-contract=off keeps the C kernel bit-identical to the Python one:
# fused multiply-adds would round dot products differently.
compile_args = ["-O3", "-ffp-contract=off"] if os.name == "posix" else []

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "anchorspace.kernels._fast",
                ["src/anchorspace/kernels/_fast.pyx"],
                extra_compile_args=compile_args,
            )
        ],
        language_level="3",
    )
except ImportError:
    warnings.warn("Cython not available, building without the compiled kernel")

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": optional_build_ext},
)
