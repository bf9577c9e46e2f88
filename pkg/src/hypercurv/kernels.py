"""Kernel backend selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is missing or when HYPERCURV_PURE=1 is set (useful for testing
and for the backend benchmark).
"""

import os

from . import _mcf_py

if os.environ.get("HYPERCURV_PURE"):
    _impl = _mcf_py
else:
    try:
        from . import _mcf_c as _impl
    except ImportError:
        _impl = _mcf_py

BACKEND = "c" if _impl is not _mcf_py else "python"

transport_plan = _impl.transport_plan
transport_value = _impl.transport_value


def backends():
    """Name -> module map of every available backend (for benchmarks/tests)."""
    out = {"python": _mcf_py}
    try:
        from . import _mcf_c
        out["c"] = _mcf_c
    except ImportError:
        pass
    return out
