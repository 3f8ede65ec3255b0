"""Build script: compiles the optional noise-kernel extension when Cython is available.

The package is fully functional without the extension; ``dptab.mechanisms``
falls back to the pure-Python kernel at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "dptab.mechanisms._kernel_cy",
                ["src/dptab/mechanisms/_kernel_cy.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
