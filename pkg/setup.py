"""Build the optional compiled kernel extension.

The package works without it (a pure-Python fallback is selected at
import time); building it just makes ROUGE-L scoring fast on long
documents.  If Cython or a C compiler is unavailable the extension is
skipped silently.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "arasum.kernels._lcs_cy",
                sources=["src/arasum/kernels/_lcs_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
