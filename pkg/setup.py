"""Build script for the optional compiled solver kernels.

The package is fully functional without the extension: storytraj.kernels
falls back to the pure-Python implementation when the compiled module is
missing, so a failed extension build only costs speed.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: could not build {ext.name} ({exc}); "
                  "the pure-Python kernels will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not available; building without compiled kernels")
        return []
    return cythonize(
        [Extension("storytraj.kernels._fast", ["src/storytraj/kernels/_fast.pyx"])],
        language_level="3",
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
