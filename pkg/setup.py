"""Build hook for the optional compiled kernel.

The package is fully functional without the extension: vbdss._core falls
back to the pure-Python twin when the compiled module is absent (or when
VBDSS_PURE_PYTHON=1). Setting VBDSS_SKIP_NATIVE=1 skips compilation.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("VBDSS_SKIP_NATIVE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/vbdss/_core/_native.pyx"],
            language_level="3",
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"vbdss: skipping native kernel build ({exc}); pure-Python fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
