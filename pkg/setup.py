"""Build shim for the optional compiled kernels.

The package is fully functional without the extension (netval.kernels falls
back to the numpy implementation), so the extension is marked optional and a
failed compile only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "netval.kernels._core",
                ["src/netval/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # keep the compiled arithmetic close to the numpy backend:
                # no FMA contraction, strict IEEE ordering
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
