"""Kernel backend selection.

The compiled extension is used when importable; ``FISHER_EC_BACKEND=python``
forces the numpy fallback.
"""

import os

from . import _pykernels

_requested = os.environ.get("FISHER_EC_BACKEND", "auto").lower()

kernels = _pykernels
if _requested != "python":
    try:
        from . import _ckernels as kernels  # noqa: F811
    except ImportError:
        if _requested == "cython":
            raise
        kernels = _pykernels


def available():
    """Names of the importable backends, compiled first."""
    names = []
    try:
        from . import _ckernels  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def get(name):
    if name == "python":
        return _pykernels
    from . import _ckernels

    return _ckernels
