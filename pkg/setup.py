"""Build script.

The compiled kernel in ``grouprob.kernels._fast`` is an optional
accelerator: if Cython or a C compiler is missing the build falls back to
the pure-Python twin in ``grouprob.kernels._pure`` and the package stays
fully functional.  Set GROUPPROB_NO_EXT=1 to skip the extension entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing / broken toolchain
            print(f"grouprob: skipping compiled kernels ({exc}); "
                  "using the pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"grouprob: failed to build {ext.name} ({exc}); "
                  "using the pure-Python fallback")


ext_modules = []
if not os.environ.get("GROUPPROB_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("grouprob.kernels._fast",
                       ["src/grouprob/kernels/_fast.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
