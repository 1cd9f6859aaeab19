"""Backend selection for the distance kernels.

The compiled extension is used when it was built; setting
``GBREGMAN_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GBREGMAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

pairwise_bregman = _impl.pairwise_bregman
assign_nearest = _impl.assign_nearest

__all__ = ["BACKEND", "pairwise_bregman", "assign_nearest"]
