from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext = Extension(
    "dmvton.warp._kernels",
    ["src/dmvton/warp/_kernels.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    extra_compile_args=["-O3"],
)

# The package stays installable without Cython; dmvton.warp falls back to the
# pure-torch kernels at import time.
setup(ext_modules=cythonize([ext], language_level=3) if cythonize else [])
