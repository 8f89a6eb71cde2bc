"""Builds the optional compiled rasterizer kernel.

The package works without it: hncg._kernels falls back to the pure-numpy
implementation when the extension is missing or fails to build.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Treat extension build failures as a warning, not an install failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"compiled raster kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled raster kernel skipped: {exc}")


def make_ext_modules():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "hncg._raster_ext",
        ["src/hncg/_raster_ext.pyx"],
        include_dirs=[np.get_include()],
        # -ffp-contract=off keeps float results bit-identical to the
        # pure-numpy fallback (no FMA contraction).
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=make_ext_modules(), cmdclass={"build_ext": OptionalBuildExt})
