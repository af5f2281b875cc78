"""Build the optional compiled scoring kernels.

The package works without the extension: litgraph._kernels falls back to the
numpy implementation when the compiled module is absent.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "litgraph._kernels._ckernels",
                ["src/litgraph/_kernels/_ckernels.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
