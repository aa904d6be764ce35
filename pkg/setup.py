"""Build script: compiles the optional speedup extension when Cython and a C
toolchain are available.  The package works without it (pure-Python fallback
selected at import time), so any build failure here downgrades to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "leveltext._speedups",
                ["src/leveltext/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    warnings.warn(f"building without compiled speedups: {exc}")

setup(ext_modules=ext_modules)
