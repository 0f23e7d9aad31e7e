"""Build script.

The compiled kernels are optional: if Cython or a C compiler is missing, or
the TREEBED_PURE environment variable is set, the package installs with the
pure-Python kernels only and everything still works.
"""

import os

from setuptools import setup

ext_modules = []
cmdclass = {}

if not os.environ.get("TREEBED_PURE"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.command.build_ext import build_ext
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "treebed._kernels._speed",
                    ["src/treebed/_kernels/_speed.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

        class OptionalBuildExt(build_ext):
            """Swallow compiler failures so the sdist still installs."""

            def run(self):
                try:
                    super().run()
                except Exception as exc:  # pragma: no cover - depends on toolchain
                    print(f"treebed: skipping compiled kernels ({exc!r})")

            def build_extension(self, ext):
                try:
                    super().build_extension(ext)
                except Exception as exc:  # pragma: no cover - depends on toolchain
                    print(f"treebed: skipping {ext.name} ({exc!r})")

        cmdclass["build_ext"] = OptionalBuildExt
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass=cmdclass)
