from setuptools import Extension, setup

# The recognition kernels have a compiled variant for speed.  Building it is
# optional: without Cython (or a C compiler) the package falls back to the
# pure-Python kernels at import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ocapprox.kernels._speedups",
                ["src/ocapprox/kernels/_speedups.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
