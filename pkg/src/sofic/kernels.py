"""Backend selection for the exhaustive-enumeration kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernels`` module is used. Set ``SOFIC_KERNELS=python`` to
force the fallback.
"""
import importlib
import os

from . import _pykernels

_forced = os.environ.get("SOFIC_KERNELS", "").strip().lower()

if _forced == "python":
    backend = _pykernels
else:
    try:
        backend = importlib.import_module("sofic._ckernels")
    except ImportError:
        if _forced == "cython":
            raise
        backend = _pykernels

BACKEND = backend.NAME


def available_backends():
    """Mapping name -> kernel module for every backend importable here."""
    out = {"python": _pykernels}
    try:
        out["cython"] = importlib.import_module("sofic._ckernels")
    except ImportError:
        pass
    return out


def count_square_roots(y):
    return backend.count_square_roots(tuple(y))


def near_commuting(n, max_defects, square=False):
    return backend.near_commuting(int(n), int(max_defects), bool(square))


def min_boundary_ratio(a, c, max_size):
    return backend.min_boundary_ratio(tuple(a), tuple(c), int(max_size))
