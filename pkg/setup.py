"""Build script: compiles the optional native kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any build failure here downgrades to a pure-Python
install instead of aborting.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "posekit._kernels._native",
                sources=["src/posekit/_kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"posekit: native kernels skipped ({exc}); pure-Python backend will be used")

setup(ext_modules=ext_modules)
