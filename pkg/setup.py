import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "strainflow._kernels._ckernels",
                ["src/strainflow/_kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback is selected at import time when the extension
    # is unavailable, so a build without Cython is still functional.
    extensions = []

setup(ext_modules=extensions)
