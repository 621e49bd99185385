"""Backend selection for the stencil kernels.

The compiled extension is preferred when importable; the NumPy module is the
fallback. Set MASECTIONS_BACKEND=numpy or =cython to force a choice (forcing
cython raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _stencil_np

_requested = os.environ.get("MASECTIONS_BACKEND", "auto").lower()

if _requested not in ("auto", "cython", "numpy"):
    raise ValueError(f"MASECTIONS_BACKEND must be auto|cython|numpy, got {_requested!r}")

if _requested in ("auto", "cython"):
    try:
        from . import _stencil as _impl

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _stencil_np
        BACKEND = "numpy"
else:
    _impl = _stencil_np
    BACKEND = "numpy"

ma_operator = _impl.ma_operator
relax = _impl.relax

# Always the NumPy path: cheap, called once per solve for diagnostics.
second_differences = _stencil_np.second_differences
