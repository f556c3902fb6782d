"""Simplex-kernel backend selection.

The GMP-backed Cython tableau is used when it was compiled; otherwise the
pure-Python Fraction tableau.  ``QCORR_PURE_PYTHON=1`` forces the fallback.
Both backends run the same pivot sequence and return identical results.
"""
from __future__ import annotations

import os

from . import _tableau_py

try:
    from . import _tableau as _tableau_ext
except ImportError:  # extension not built
    _tableau_ext = None

_BACKENDS = {"python": _tableau_py.Tableau}
if _tableau_ext is not None:
    _BACKENDS["gmp"] = _tableau_ext.Tableau

DEFAULT_BACKEND = "gmp" if "gmp" in _BACKENDS and not os.environ.get("QCORR_PURE_PYTHON") else "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def tableau_class(backend: str | None = None):
    name = backend or DEFAULT_BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"simplex backend {name!r} is not available; have {available_backends()}") from None
