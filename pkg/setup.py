import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the compiled decoder kernel if possible.

    The package selects a pure-Python kernel at import time when the
    extension is missing, so a failed build must not fail the install.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: skipping compiled kernel build: {exc}", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: skipping {ext.name}: {exc}", file=sys.stderr)


extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cnecc._ckernel",
                ["src/cnecc/_ckernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # pragma: no cover - cython is a soft build dependency
    print("warning: Cython not available, installing without compiled kernel", file=sys.stderr)

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
