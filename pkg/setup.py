"""Build script for the optional compiled overlap-counting kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so the extension is marked optional: a failed compile
degrades to the fallback instead of failing the install.

Build in place for development with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "dynatrack._paircounts",
        ["src/dynatrack/_paircounts.pyx"],
        extra_compile_args=["-O3"],
    )
    ext.optional = True
    ext_modules = cythonize(ext, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
