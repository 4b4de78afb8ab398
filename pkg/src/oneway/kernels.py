"""Kernel selection: the compiled extension when built, else pure Python.

Set ``ONEWAY_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("ONEWAY_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "pure" if _impl is _kernels_py else "compiled"
gf2_solve_packed = _impl.gf2_solve_packed
column_residual = _impl.column_residual
