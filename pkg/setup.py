import os

from setuptools import Extension, setup

# The compiled engine is optional: set EVOSORT_NO_EXT=1 to install the pure
# Python package only (everything still works, just slower).
ext_modules = []
if not os.environ.get("EVOSORT_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "evosort._kernels",
                ["src/evosort/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
