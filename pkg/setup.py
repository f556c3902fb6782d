"""Build the optional GMP simplex kernel.

The package works without it: ``qcorr.kernels`` falls back to the
pure-Python tableau when ``qcorr._tableau`` cannot be imported.  Set
``QCORR_NO_EXT=1`` to skip the extension build entirely.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("QCORR_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("qcorr._tableau", ["src/qcorr/_tableau.pyx"], libraries=["gmp"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
